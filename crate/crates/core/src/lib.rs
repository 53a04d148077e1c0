//! Computable brackets for Cohen-type strongly summing norms.
//!
//! The crate models operators between finite-dimensional l_q spaces and
//! estimates, brackets and cross-validates their strongly p-summing norms in
//! four flavors: linear, multilinear (two equivalent defining forms),
//! multiple-index multilinear, and homogeneous polynomial. On top of the
//! estimators sit check suites that machine-verify the structural
//! inequalities tying the flavors together: monotonicity chains of sequence
//! norms, ideal behaviour under composition, coherence and compatibility of
//! the polynomial scale with the multilinear one, a padding identity for
//! symmetric forms, holomorphy-type growth of differentials, and the
//! dimension-driven growth of the identity's norm.
//!
//! Everything is deterministic: randomness is ChaCha8 seeded from a master
//! seed, reductions are order-fixed, and equal (config, seed) pairs
//! reproduce equal outputs bit for bit.

pub mod document;
pub mod error;
pub mod estimators;
pub mod grids;
mod linalg;
pub mod operators;
pub mod report;
pub mod seqnorms;
pub mod spaces;
pub mod suites;
pub mod tensor;
mod util;

pub use error::{Error, Result};
pub use operators::{AnyOperator, HomogeneousPolynomial, LinearOperator, MultilinearOperator};
pub use spaces::{Exponent, Functional, NormedSpace, Vector};
