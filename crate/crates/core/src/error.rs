use thiserror::Error;

/// Crate-wide error type. Every fallible operation reports through this enum;
/// callers can match on the variant to distinguish contract violations
/// (dimension/arity mismatches) from numerical degeneracies.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("arity mismatch: operator takes {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("slot {slot} out of range for degree {degree}")]
    SlotOutOfRange { slot: usize, degree: usize },

    #[error("zero vector has no norming functional")]
    ZeroVector,

    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("exponent {got} outside required range {required}")]
    ExponentRange { got: f64, required: &'static str },

    #[error("last slot must be one-dimensional, found dimension {dim}")]
    NotScalarSlot { dim: usize },

    #[error("differential order {k} out of range for degree {n}")]
    DegreeRange { k: usize, n: usize },

    #[error("tensor not symmetric in the required slots: deviation {deviation:e}")]
    AsymmetricOperator { deviation: f64 },

    #[error("degenerate grid: domination program has no positive value")]
    DegenerateGrid,

    #[error("evaluation budget exceeded: needs {required}, budget {budget}")]
    BudgetExceeded { required: u64, budget: u64 },

    #[error("incompatible relation: {0}")]
    IncompatibleRelation(String),

    #[error("inconsistent witness: {0}")]
    InconsistentWitness(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {message}")]
    Document { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
