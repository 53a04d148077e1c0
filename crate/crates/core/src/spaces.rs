//! Finite-dimensional l_q spaces and their duality plumbing.
//!
//! Everything downstream works over R^dim carrying an l_q norm. The dual of
//! (dim, q) is (dim, q*) with 1/q + 1/q* = 1, and at this scale the bidual is
//! the space itself. A `Functional` stores its coefficients together with the
//! space it acts on; its own norm is the l_{q*} norm of the coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm exponent in [1, inf]. The endpoints are exact tags so that `1` and
/// `inf` never suffer floating-point drift; finite interior values are f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    One,
    /// Strictly between 1 and infinity.
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// Normalizing constructor: 1.0 becomes `One`, +inf becomes `Infinity`.
    pub fn new(value: f64) -> Result<Self> {
        if value == 1.0 {
            Ok(Exponent::One)
        } else if value.is_infinite() && value > 0.0 {
            Ok(Exponent::Infinity)
        } else if value.is_finite() && value > 1.0 {
            Ok(Exponent::Finite(value))
        } else {
            Err(Error::InvalidExponent(value))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::One => 1.0,
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_one(self) -> bool {
        matches!(self, Exponent::One)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// Conjugate exponent: 1/p + 1/p* = 1, with 1 <-> inf.
    ///
    /// The quotient p/(p-1) alone is not an exact involution in f64 (for
    /// p = 4 the naive round trip lands one ulp off 4). Among the naive
    /// quotient and its two ulp neighbours, candidates whose own quotient
    /// maps back to p exactly are preferred, and of those the one with the
    /// most trailing zero bits: fl(4/3) has both 4.0 and 4.0 + 1ulp as
    /// exact partners, and the trailing-zero rule picks 4.0. This makes the
    /// map an exact involution on {1, 4/3, 2, 4, inf}.
    pub fn conjugate(self) -> Self {
        match self {
            Exponent::One => Exponent::Infinity,
            Exponent::Infinity => Exponent::One,
            Exponent::Finite(p) => {
                let naive = p / (p - 1.0);
                let mut best: Option<f64> = None;
                for cand in [naive, naive.next_down(), naive.next_up()] {
                    if cand > 1.0 && cand.is_finite() && cand / (cand - 1.0) == p {
                        let better = match best {
                            None => true,
                            Some(b) => {
                                cand.to_bits().trailing_zeros() > b.to_bits().trailing_zeros()
                            }
                        };
                        if better {
                            best = Some(cand);
                        }
                    }
                }
                Exponent::Finite(best.unwrap_or(naive))
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinity => s.serialize_str("inf"),
            other => s.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v).map_err(DeError::custom),
            Raw::Str(s) if s == "inf" => Ok(Exponent::Infinity),
            Raw::Str(s) => Err(DeError::custom(format!(
                "invalid exponent {s:?}: expected a number >= 1 or \"inf\""
            ))),
        }
    }
}

/// R^dim with the l_q norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub dim: usize,
    pub q: Exponent,
}

impl NormedSpace {
    pub fn new(dim: usize, q: Exponent) -> Self {
        NormedSpace { dim, q }
    }

    /// The scalar field as a one-dimensional space. Any exponent gives the
    /// same norm in dimension one; we fix q = 2.
    pub fn scalar() -> Self {
        NormedSpace { dim: 1, q: Exponent::Finite(2.0) }
    }

    pub fn dual(self) -> Self {
        NormedSpace { dim: self.dim, q: self.q.conjugate() }
    }
}

/// l_q norm of a coordinate slice, overflow-safe via scaling by the max.
pub fn lq_norm(coords: &[f64], q: Exponent) -> f64 {
    match q {
        Exponent::One => coords.iter().map(|x| x.abs()).sum(),
        Exponent::Infinity => coords.iter().fold(0.0, |m, x| m.max(x.abs())),
        Exponent::Finite(p) => {
            let max = coords.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if max == 0.0 {
                return 0.0;
            }
            let sum: f64 = coords.iter().map(|x| (x.abs() / max).powf(p)).sum();
            max * sum.powf(1.0 / p)
        }
    }
}

/// sign with sign(0) := +1, the tie-break convention used everywhere.
pub(crate) fn sign(t: f64) -> f64 {
    if t < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Unit-l_q vector maximizing the dot product with `coords`.
///
/// Attains sup_{|x|_q = 1} <coords, x> = |coords|_{q*}. Ties at q = 1 break
/// to the lowest index; zeros take sign +1. Assumes `coords` is not all zero.
pub(crate) fn steepest_unit(coords: &[f64], q: Exponent) -> Vec<f64> {
    match q {
        Exponent::One => {
            let mut best = 0;
            for (i, c) in coords.iter().enumerate() {
                if c.abs() > coords[best].abs() {
                    best = i;
                }
            }
            let mut out = vec![0.0; coords.len()];
            out[best] = sign(coords[best]);
            out
        }
        Exponent::Infinity => coords.iter().map(|&c| sign(c)).collect(),
        Exponent::Finite(p) => {
            let pstar = Exponent::Finite(p).conjugate().value();
            let scale = lq_norm(coords, Exponent::Finite(pstar)).powf(pstar - 1.0);
            coords
                .iter()
                .map(|&c| sign(c) * c.abs().powf(pstar - 1.0) / scale)
                .collect()
        }
    }
}

/// Element of a `NormedSpace`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    pub coords: Vec<f64>,
    pub space: NormedSpace,
}

impl Vector {
    pub fn new(coords: Vec<f64>, space: NormedSpace) -> Result<Self> {
        if coords.len() != space.dim {
            return Err(Error::DimensionMismatch { expected: space.dim, got: coords.len() });
        }
        Ok(Vector { coords, space })
    }

    pub fn zero(space: NormedSpace) -> Self {
        Vector { coords: vec![0.0; space.dim], space }
    }

    pub fn basis(space: NormedSpace, k: usize) -> Self {
        let mut coords = vec![0.0; space.dim];
        coords[k] = 1.0;
        Vector { coords, space }
    }

    pub fn norm(&self) -> f64 {
        lq_norm(&self.coords, self.space.q)
    }

    pub fn scale(&self, t: f64) -> Self {
        Vector { coords: self.coords.iter().map(|c| c * t).collect(), space: self.space }
    }
}

/// Continuous linear functional on `space`; coefficients live in the dual,
/// so `norm` is the l_{q*} norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub coords: Vec<f64>,
    /// The space the functional acts on.
    pub space: NormedSpace,
}

impl Functional {
    pub fn new(coords: Vec<f64>, space: NormedSpace) -> Result<Self> {
        if coords.len() != space.dim {
            return Err(Error::DimensionMismatch { expected: space.dim, got: coords.len() });
        }
        Ok(Functional { coords, space })
    }

    pub fn zero(space: NormedSpace) -> Self {
        Functional { coords: vec![0.0; space.dim], space }
    }

    pub fn basis(space: NormedSpace, k: usize) -> Self {
        let mut coords = vec![0.0; space.dim];
        coords[k] = 1.0;
        Functional { coords, space }
    }

    pub fn norm(&self) -> f64 {
        lq_norm(&self.coords, self.space.q.conjugate())
    }

    pub fn scale(&self, t: f64) -> Self {
        Functional { coords: self.coords.iter().map(|c| c * t).collect(), space: self.space }
    }

    /// Unit vector x with self(x) = |self|; the extremal direction of the
    /// functional on the unit ball of its space.
    pub fn norming_vector(&self) -> Result<Vector> {
        if self.coords.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Vector { coords: steepest_unit(&self.coords, self.space.q), space: self.space })
    }
}

/// Dual pairing <phi, x>. Both must live on the same space.
pub fn pairing(phi: &Functional, x: &Vector) -> Result<f64> {
    if phi.space != x.space {
        return Err(Error::SpaceMismatch(format!(
            "functional on {:?}, vector in {:?}",
            phi.space, x.space
        )));
    }
    Ok(dot(&phi.coords, &x.coords))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Norm-one functional phi with phi(x) = |x|.
///
/// Deterministic tie-breaks: for q = inf the lowest-index coordinate of
/// maximal modulus is picked; sign(0) = +1 throughout.
pub fn norming_functional(x: &Vector) -> Result<Functional> {
    if x.coords.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(Functional {
        coords: steepest_unit(&x.coords, x.space.q.conjugate()),
        space: x.space,
    })
}
