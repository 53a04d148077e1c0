//! The three sequence norms behind the summing-norm machinery.
//!
//! For a finite family (x_i) in an l_q space E and p in [1, inf]:
//!
//! * strong:  ( sum_i |x_i|^p )^(1/p)
//! * weak (of functionals phi_i on F):
//!            sup over the unit ball of F of ( sum_i |phi_i(y)|^p )^(1/p)
//! * Cohen:   sup of sum_i |phi_i(x_i)| over functional families with weak
//!            l_{p*} norm at most one.
//!
//! Pointwise the chain weak <= strong <= Cohen holds; at p = 1 the Cohen
//! norm collapses to the strong norm, at p = inf the strong and weak norms
//! agree.
//!
//! The weak norm is computed exactly when the unit ball allows it (single
//! functional, Euclidean/spectral case, polytope balls by vertex
//! enumeration) and by monotone conditional-gradient ascent over the sphere
//! otherwise; ascent values are lower approximations and carry a
//! grid-refinement diagnostic. The Cohen norm is always a lower estimate
//! with an explicit witness; its starting point is the duality witness,
//! which pins the estimate at or above the strong norm.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grids::sphere_grid;
use crate::linalg::spectral_norm;
use crate::spaces::{
    lq_norm, norming_functional, steepest_unit, Exponent, Functional, NormedSpace, Vector,
};
use crate::util::derive_seed;

/// Nonempty family of vectors sharing one space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorFamily {
    members: Vec<Vector>,
}

impl VectorFamily {
    pub fn new(members: Vec<Vector>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let space = members[0].space;
        for m in &members {
            if m.space != space {
                return Err(Error::SpaceMismatch(format!(
                    "family mixes {:?} and {:?}",
                    space, m.space
                )));
            }
        }
        Ok(VectorFamily { members })
    }

    pub fn members(&self) -> &[Vector] {
        &self.members
    }

    pub fn space(&self) -> NormedSpace {
        self.members[0].space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Canonical embedding into the bidual: each member acts on E' by
    /// evaluation, with the same coordinates.
    pub fn as_functionals(&self) -> FunctionalFamily {
        let dual = self.space().dual();
        FunctionalFamily {
            members: self
                .members
                .iter()
                .map(|x| Functional { coords: x.coords.clone(), space: dual })
                .collect(),
            shape: None,
        }
    }

    pub fn member_norms(&self) -> Vec<f64> {
        self.members.iter().map(|x| x.norm()).collect()
    }
}

/// Nonempty family of functionals on one space, optionally carrying a
/// multi-index shape (row-major flattening).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalFamily {
    members: Vec<Functional>,
    shape: Option<Vec<usize>>,
}

impl FunctionalFamily {
    pub fn new(members: Vec<Functional>) -> Result<Self> {
        Self::with_shape(members, None)
    }

    pub fn with_shape(members: Vec<Functional>, shape: Option<Vec<usize>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let space = members[0].space;
        for m in &members {
            if m.space != space {
                return Err(Error::SpaceMismatch(format!(
                    "family mixes {:?} and {:?}",
                    space, m.space
                )));
            }
        }
        if let Some(s) = &shape {
            let len: usize = s.iter().product();
            if len != members.len() {
                return Err(Error::DimensionMismatch { expected: len, got: members.len() });
            }
        }
        Ok(FunctionalFamily { members, shape })
    }

    pub fn members(&self) -> &[Functional] {
        &self.members
    }

    pub fn shape(&self) -> Option<&[usize]> {
        self.shape.as_deref()
    }

    pub fn space(&self) -> NormedSpace {
        self.members[0].space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major coefficient stack, one row per member.
    pub fn stack(&self) -> Vec<f64> {
        let d = self.space().dim;
        let mut out = Vec::with_capacity(self.members.len() * d);
        for m in &self.members {
            out.extend_from_slice(&m.coords);
        }
        out
    }
}

/// Restart/iteration budget for the ascent-based estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig { restarts: 32, iters: 60, seed: 0 }
    }
}

/// ( sum |x_i|^p )^(1/p); max at p = inf, plain sum at p = 1.
pub fn strong_lp_norm(fam: &VectorFamily, p: Exponent) -> f64 {
    lq_norm(&fam.member_norms(), p)
}

/// Weak norm value plus how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakNormDetail {
    pub value: f64,
    /// Point of the unit ball attaining (or best approximating) the sup.
    pub maximizer: Vector,
    /// True when computed by a closed form or exhaustive vertex enumeration.
    pub exact: bool,
    /// For ascent values: approximation slack recovered by a coarse sphere
    /// grid, zero when the ascent already dominates every grid point.
    pub grid_gap: f64,
}

pub fn weak_lp_norm(fam: &FunctionalFamily, p: Exponent) -> Result<f64> {
    weak_lp_norm_with(fam, p, &AscentConfig::default())
}

pub fn weak_lp_norm_with(fam: &FunctionalFamily, p: Exponent, cfg: &AscentConfig) -> Result<f64> {
    weak_lp_norm_detailed(fam, p, cfg).map(|d| d.value)
}

pub fn weak_lp_norm_detailed(
    fam: &FunctionalFamily,
    p: Exponent,
    cfg: &AscentConfig,
) -> Result<WeakNormDetail> {
    if p.is_one() {
        return Err(Error::ExponentRange { got: 1.0, required: "(1, inf]" });
    }
    let space = fam.space();
    let d = space.dim;
    let m = fam.len();

    let zero_out = |value: f64, maximizer: Vector, exact: bool| WeakNormDetail {
        value,
        maximizer,
        exact,
        grid_gap: 0.0,
    };

    if fam.members.iter().all(|f| f.coords.iter().all(|&c| c == 0.0)) {
        return Ok(zero_out(0.0, Vector::basis(space, 0), true));
    }

    // One-dimensional predual: the ball is [-1, 1] and the sup sits at 1.
    if d == 1 {
        let flat: Vec<f64> = fam.members.iter().map(|f| f.coords[0]).collect();
        return Ok(zero_out(lq_norm(&flat, p), Vector::new(vec![1.0], space)?, true));
    }

    // p = inf: sup and max swap, so this is the largest dual norm.
    if p.is_infinite() {
        let mut best = 0;
        let mut best_norm = fam.members[0].norm();
        for (i, f) in fam.members.iter().enumerate().skip(1) {
            let n = f.norm();
            if n > best_norm {
                best = i;
                best_norm = n;
            }
        }
        let maximizer = fam.members[best].norming_vector()?;
        return Ok(zero_out(best_norm, maximizer, true));
    }

    // Single functional: the sup is its dual norm, attained at its norming
    // vector.
    if m == 1 {
        let f = &fam.members[0];
        return Ok(zero_out(f.norm(), f.norming_vector()?, true));
    }

    let pv = p.value();
    let stack = fam.stack();

    // Euclidean ball with p = 2: largest singular value of the stack.
    if space.q == Exponent::Finite(2.0) && pv == 2.0 {
        let (sigma, v) = spectral_norm(m, d, &stack);
        let maximizer = Vector::new(v, space)?;
        return Ok(zero_out(sigma, maximizer, true));
    }

    let objective = |y: &[f64]| -> f64 {
        let vals: Vec<f64> = fam.members.iter().map(|f| crate::spaces::dot(&f.coords, y)).collect();
        lq_norm(&vals, p)
    };

    // Polytope balls: the objective is convex, so the sup sits on a vertex.
    // l_1 ball: signed coordinate vectors (sign irrelevant by evenness).
    if space.q == Exponent::One && d <= 12 {
        let mut best_val = f64::NEG_INFINITY;
        let mut best_y = vec![0.0; d];
        for j in 0..d {
            let mut y = vec![0.0; d];
            y[j] = 1.0;
            let v = objective(&y);
            if v > best_val {
                best_val = v;
                best_y = y;
            }
        }
        return Ok(zero_out(best_val, Vector::new(best_y, space)?, true));
    }
    // l_inf ball: sign vertices; fix the first sign by evenness.
    if space.q == Exponent::Infinity && d <= 12 {
        let mut best_val = f64::NEG_INFINITY;
        let mut best_y = vec![0.0; d];
        for bits in 0..(1u64 << (d - 1)) {
            let mut y = vec![1.0; d];
            for (j, slot) in y.iter_mut().enumerate().skip(1) {
                if bits >> (j - 1) & 1 == 1 {
                    *slot = -1.0;
                }
            }
            let v = objective(&y);
            if v > best_val {
                best_val = v;
                best_y = y;
            }
        }
        return Ok(zero_out(best_val, Vector::new(best_y, space)?, true));
    }

    // General case: monotone conditional-gradient ascent with restarts. The
    // objective is convex and 1-homogeneous, so jumping to the unit vector
    // maximizing the linearization never decreases it.
    let mut best_val = f64::NEG_INFINITY;
    let mut best_y = vec![0.0; d];
    for r in 0..cfg.restarts.max(1) {
        let mut y: Vec<f64> = if r < d {
            let mut y = vec![0.0; d];
            y[r] = 1.0;
            y
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, r as u64));
            let mut y: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let n = lq_norm(&y, space.q);
            if n < 1e-12 {
                y = vec![0.0; d];
                y[0] = 1.0;
            } else {
                y.iter_mut().for_each(|c| *c /= n);
            }
            y
        };
        let mut val = objective(&y);
        for _ in 0..cfg.iters {
            let vals: Vec<f64> =
                fam.members.iter().map(|f| crate::spaces::dot(&f.coords, &y)).collect();
            let scale = lq_norm(&vals, p);
            if scale == 0.0 {
                break;
            }
            // Subgradient of the p-norm of the evaluation vector.
            let mut grad = vec![0.0; d];
            if p.is_infinite() {
                let mut k = 0;
                for (i, v) in vals.iter().enumerate() {
                    if v.abs() > vals[k].abs() {
                        k = i;
                    }
                }
                let s = crate::spaces::sign(vals[k]);
                for (g, c) in grad.iter_mut().zip(&fam.members[k].coords) {
                    *g = s * c;
                }
            } else {
                for (f, v) in fam.members.iter().zip(&vals) {
                    let w = crate::spaces::sign(*v) * (v.abs() / scale).powf(pv - 1.0);
                    if w == 0.0 {
                        continue;
                    }
                    for (g, c) in grad.iter_mut().zip(&f.coords) {
                        *g += w * c;
                    }
                }
            }
            if grad.iter().all(|&g| g == 0.0) {
                break;
            }
            let y_new = steepest_unit(&grad, space.q);
            let val_new = objective(&y_new);
            if val_new <= val * (1.0 + 1e-15) {
                break;
            }
            y = y_new;
            val = val_new;
        }
        if val > best_val {
            best_val = val;
            best_y = y;
        }
    }

    // Refinement diagnostic: a coarse deterministic grid should not beat the
    // ascent; if it does, keep the better value and report the gap.
    let mut grid_gap = 0.0f64;
    for pt in sphere_grid(space, 32) {
        let v = objective(&pt);
        if v > best_val {
            grid_gap = grid_gap.max(v - best_val);
            best_val = v;
            best_y = pt;
        }
    }
    Ok(WeakNormDetail {
        value: best_val,
        maximizer: Vector::new(best_y, space)?,
        exact: false,
        grid_gap,
    })
}

/// Lower estimate of the Cohen sequence norm together with the functional
/// family witnessing it (normalized to weak l_{p*} norm one).
#[derive(Debug, Clone, PartialEq)]
pub struct CohenEstimate {
    pub value: f64,
    pub witness: FunctionalFamily,
}

pub fn cohen_seq_norm(fam: &VectorFamily, p: Exponent) -> Result<CohenEstimate> {
    cohen_seq_norm_with(fam, p, &AscentConfig::default())
}

pub fn cohen_seq_norm_with(
    fam: &VectorFamily,
    p: Exponent,
    cfg: &AscentConfig,
) -> Result<CohenEstimate> {
    if p.is_infinite() {
        return Err(Error::ExponentRange { got: f64::INFINITY, required: "[1, inf)" });
    }
    let space = fam.space();
    let m = fam.len();

    let norming_or_zero = |x: &Vector| -> Functional {
        norming_functional(x).unwrap_or_else(|_| Functional::zero(space))
    };

    // p = 1: the dual constraint caps every functional at the unit ball, so
    // the sup is exactly the sum of norms, attained by norming functionals.
    if p.is_one() {
        let witness: Vec<Functional> = fam.members.iter().map(&norming_or_zero).collect();
        let value: f64 = fam.member_norms().iter().sum();
        return Ok(CohenEstimate { value, witness: FunctionalFamily::new(witness)? });
    }

    if fam.members.iter().all(|x| x.coords.iter().all(|&c| c == 0.0)) {
        let witness = FunctionalFamily::new(vec![Functional::zero(space); m])?;
        return Ok(CohenEstimate { value: 0.0, witness });
    }

    let pv = p.value();
    let pstar = p.conjugate();
    let weak_cfg = AscentConfig {
        restarts: cfg.restarts.div_ceil(4).max(8),
        iters: cfg.iters,
        seed: derive_seed(cfg.seed, 0x7EA4),
    };
    let weak_of = |coords: &[Vec<f64>]| -> Result<f64> {
        let members = coords
            .iter()
            .map(|c| Functional::new(c.clone(), space))
            .collect::<Result<Vec<_>>>()?;
        weak_lp_norm_with(&FunctionalFamily::new(members)?, pstar, &weak_cfg)
    };
    let numerator = |coords: &[Vec<f64>]| -> f64 {
        coords
            .iter()
            .zip(&fam.members)
            .map(|(c, x)| crate::spaces::dot(c, &x.coords).abs())
            .sum()
    };

    let mut best_val = 0.0f64;
    let mut best: Option<Vec<Vec<f64>>> = None;

    for r in 0..cfg.restarts.max(1) {
        // Restart 0 is the duality witness phi_i = |x_i|^(p-1) n(x_i); its
        // ratio is at least the strong norm. Later restarts are random.
        let mut coords: Vec<Vec<f64>> = if r == 0 {
            fam.members
                .iter()
                .map(|x| {
                    let f = norming_or_zero(x);
                    let w = x.norm().powf(pv - 1.0);
                    f.coords.iter().map(|c| c * w).collect()
                })
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x1000 + r as u64));
            (0..m)
                .map(|_| (0..space.dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
                .collect()
        };

        let w = weak_of(&coords)?;
        if w == 0.0 {
            continue;
        }
        coords.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v /= w));
        let mut val = numerator(&coords);
        if val > best_val {
            best_val = val;
            best = Some(coords.clone());
        }

        for it in 0..cfg.iters {
            // Ascend the numerator, then renormalize by the recomputed weak
            // norm. The numerator's subgradient in phi_i is sign * x_i.
            let eta = 0.5 / (1.0 + it as f64 / 4.0);
            let frob: f64 =
                coords.iter().flat_map(|c| c.iter()).map(|v| v * v).sum::<f64>().sqrt();
            let mut stepped = coords.clone();
            for (c, x) in stepped.iter_mut().zip(&fam.members) {
                let s = crate::spaces::sign(crate::spaces::dot(c, &x.coords));
                let gnorm = x.norm().max(1e-12);
                for (slot, xc) in c.iter_mut().zip(&x.coords) {
                    *slot += eta * frob.max(1e-12) * s * xc / gnorm;
                }
            }
            let w = weak_of(&stepped)?;
            if w == 0.0 {
                break;
            }
            stepped.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v /= w));
            let new_val = numerator(&stepped);
            coords = stepped;
            if new_val > best_val {
                best_val = new_val;
                best = Some(coords.clone());
            }
            if new_val > val * (1.0 - 1e-12) && new_val <= val * (1.0 + 1e-12) {
                val = new_val;
                break;
            }
            val = new_val;
        }
    }

    let best = best.ok_or_else(|| {
        Error::Numerical("cohen ascent found no admissible functional family".into())
    })?;
    let members = best
        .into_iter()
        .map(|c| Functional::new(c, space))
        .collect::<Result<Vec<_>>>()?;
    Ok(CohenEstimate { value: best_val, witness: FunctionalFamily::new(members)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::pairing;

    fn l2(dim: usize) -> NormedSpace {
        NormedSpace::new(dim, Exponent::Finite(2.0))
    }

    fn fam(space: NormedSpace, rows: &[&[f64]]) -> VectorFamily {
        VectorFamily::new(
            rows.iter().map(|r| Vector::new(r.to_vec(), space).unwrap()).collect(),
        )
        .unwrap()
    }

    fn ffam(space: NormedSpace, rows: &[&[f64]]) -> FunctionalFamily {
        FunctionalFamily::new(
            rows.iter().map(|r| Functional::new(r.to_vec(), space).unwrap()).collect(),
        )
        .unwrap()
    }

    fn random_family(
        space: NormedSpace,
        m: usize,
        rng: &mut ChaCha8Rng,
    ) -> VectorFamily {
        VectorFamily::new(
            (0..m)
                .map(|_| {
                    Vector::new(
                        (0..space.dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
                        space,
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn strong_norm_examples() {
        let e = l2(2);
        let f = fam(e, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!((strong_lp_norm(&f, Exponent::Finite(2.0)) - 2f64.sqrt()).abs() < 1e-12);
        assert!((strong_lp_norm(&f, Exponent::One) - 2.0).abs() < 1e-12);
        assert!((strong_lp_norm(&f, Exponent::Infinity) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_orthonormal_basis_is_one() {
        let e = l2(2);
        let f = ffam(e, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let v = weak_lp_norm(&f, Exponent::Finite(2.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_repeated_functional_stacks() {
        let e = l2(2);
        let f = ffam(e, &[&[1.0, 0.0], &[1.0, 0.0]]);
        let v = weak_lp_norm(&f, Exponent::Finite(2.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_single_functional_is_dual_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for q in [Exponent::One, Exponent::Finite(4.0 / 3.0), Exponent::Finite(2.0), Exponent::Infinity]
        {
            let space = NormedSpace::new(4, q);
            let phi = Functional::new(
                (0..4).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
                space,
            )
            .unwrap();
            let f = FunctionalFamily::new(vec![phi.clone()]).unwrap();
            for p in [Exponent::Finite(4.0 / 3.0), Exponent::Finite(2.0), Exponent::Finite(4.0)] {
                let v = weak_lp_norm(&f, p).unwrap();
                assert!((v - phi.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weak_norm_infinity_is_max_dual_norm() {
        let e = NormedSpace::new(3, Exponent::One);
        let f = ffam(e, &[&[1.0, -2.0, 0.5], &[0.1, 0.2, 0.3]]);
        let expect = f.members()[0].norm();
        let v = weak_lp_norm(&f, Exponent::Infinity).unwrap();
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_cross_polytope_vertices() {
        // Predual ball of an l_1 space: columns compete, answer is the best
        // column p-norm.
        let e = NormedSpace::new(3, Exponent::One);
        let f = ffam(e, &[&[1.0, -2.0, 0.5], &[2.0, 0.0, -1.0]]);
        let p = Exponent::Finite(2.0);
        let direct = (0..3)
            .map(|j| {
                f.members().iter().map(|m| m.coords[j].powi(2)).sum::<f64>().sqrt()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let v = weak_lp_norm(&f, p).unwrap();
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_cube_vertices_match_ascent() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let e = NormedSpace::new(3, Exponent::Infinity);
        for _ in 0..20 {
            let f = FunctionalFamily::new(
                (0..3)
                    .map(|_| {
                        Functional::new(
                            (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
                            e,
                        )
                        .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let exact = weak_lp_norm(&f, Exponent::Finite(2.0)).unwrap();
            // Independent check: exhaustive over all 8 sign vectors.
            let mut brute = f64::NEG_INFINITY;
            for bits in 0..8u32 {
                let y: Vec<f64> =
                    (0..3).map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
                let v = f
                    .members()
                    .iter()
                    .map(|m| crate::spaces::dot(&m.coords, &y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                brute = brute.max(v);
            }
            assert!((exact - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_norm_ascent_close_to_spectral() {
        // Force the generic ascent path with p = 4 on a Euclidean ball and
        // cross-check against the trivial single-row cases stacked: here we
        // just make sure ascent stays within bracket [max row norm, strong].
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let e = l2(3);
        for _ in 0..10 {
            let f = FunctionalFamily::new(
                (0..4)
                    .map(|_| {
                        Functional::new(
                            (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
                            e,
                        )
                        .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let p = Exponent::Finite(4.0);
            let v = weak_lp_norm(&f, p).unwrap();
            let lo = f.members().iter().map(|m| m.norm()).fold(0.0, f64::max);
            let hi = {
                let norms: Vec<f64> = f.members().iter().map(|m| m.norm()).collect();
                lq_norm(&norms, p)
            };
            assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "{lo} <= {v} <= {hi}");
        }
    }

    #[test]
    fn weak_norm_rejects_p_one() {
        let f = ffam(l2(2), &[&[1.0, 0.0]]);
        assert!(matches!(
            weak_lp_norm(&f, Exponent::One),
            Err(Error::ExponentRange { .. })
        ));
    }

    #[test]
    fn cohen_p_one_is_strong_with_norming_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for q in [Exponent::One, Exponent::Finite(2.0), Exponent::Infinity] {
            let space = NormedSpace::new(3, q);
            let f = random_family(space, 4, &mut rng);
            let est = cohen_seq_norm(&f, Exponent::One).unwrap();
            let strong = strong_lp_norm(&f, Exponent::One);
            assert!((est.value - strong).abs() < 1e-12);
            let replay: f64 = est
                .witness
                .members()
                .iter()
                .zip(f.members())
                .map(|(phi, x)| pairing(phi, x).unwrap().abs())
                .sum();
            assert!((replay - strong).abs() < 1e-10);
        }
    }

    #[test]
    fn cohen_orthonormal_basis_reaches_nuclear_value() {
        // For (e_1, e_2) in l_2^2 with p = 2 the Cohen norm is 2; the
        // duality witness already attains it.
        let f = fam(l2(2), &[&[1.0, 0.0], &[0.0, 1.0]]);
        let est = cohen_seq_norm(&f, Exponent::Finite(2.0)).unwrap();
        assert!(est.value >= 2.0 - 1e-9, "got {}", est.value);
        assert!(est.value <= 2.0 + 1e-9, "got {}", est.value);
    }

    #[test]
    fn cohen_single_vector_is_its_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for q in [Exponent::One, Exponent::Finite(2.0), Exponent::Finite(4.0)] {
            let space = NormedSpace::new(3, q);
            let f = random_family(space, 1, &mut rng);
            let est = cohen_seq_norm(&f, Exponent::Finite(2.0)).unwrap();
            let n = f.members()[0].norm();
            assert!((est.value - n).abs() < 1e-9 * (1.0 + n), "q={q:?}");
        }
    }

    #[test]
    fn cohen_zero_family_is_zero() {
        let space = l2(2);
        let f = VectorFamily::new(vec![Vector::zero(space); 3]).unwrap();
        let est = cohen_seq_norm(&f, Exponent::Finite(2.0)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn cohen_rejects_p_infinity() {
        let f = fam(l2(2), &[&[1.0, 0.0]]);
        assert!(matches!(
            cohen_seq_norm(&f, Exponent::Infinity),
            Err(Error::ExponentRange { .. })
        ));
    }

    #[test]
    fn chain_weak_strong_cohen() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let mut count = 0;
        for q in [Exponent::One, Exponent::Finite(2.0), Exponent::Infinity] {
            for p in [Exponent::Finite(4.0 / 3.0), Exponent::Finite(2.0), Exponent::Finite(4.0)] {
                for _ in 0..25 {
                    let space = NormedSpace::new(1 + count % 4, q);
                    let f = random_family(space, 1 + (count / 3) % 5, &mut rng);
                    count += 1;
                    let weak = weak_lp_norm(&f.as_functionals(), p).unwrap();
                    let strong = strong_lp_norm(&f, p);
                    let cohen = cohen_seq_norm(&f, p).unwrap().value;
                    assert!(weak <= strong + 1e-9, "weak {weak} strong {strong}");
                    assert!(strong <= cohen + 1e-9, "strong {strong} cohen {cohen}");
                }
            }
        }
        assert!(count >= 200);
    }

    #[test]
    fn strong_at_infinity_equals_weak_at_infinity() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for _ in 0..50 {
            let f = random_family(l2(3), 4, &mut rng);
            let strong = strong_lp_norm(&f, Exponent::Infinity);
            let weak = weak_lp_norm(&f.as_functionals(), Exponent::Infinity).unwrap();
            assert!((strong - weak).abs() < 1e-9);
        }
    }

    #[test]
    fn norms_are_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for _ in 0..30 {
            let f = random_family(l2(3), 3, &mut rng);
            let t: f64 = rng.gen::<f64>() * 3.0 - 1.5;
            let scaled =
                VectorFamily::new(f.members().iter().map(|x| x.scale(t)).collect()).unwrap();
            let p = Exponent::Finite(2.0);
            let s0 = strong_lp_norm(&f, p);
            let s1 = strong_lp_norm(&scaled, p);
            assert!((s1 - t.abs() * s0).abs() < 1e-10 * (1.0 + s0));
            let w0 = weak_lp_norm(&f.as_functionals(), p).unwrap();
            let w1 = weak_lp_norm(&scaled.as_functionals(), p).unwrap();
            assert!((w1 - t.abs() * w0).abs() < 1e-10 * (1.0 + w0));
        }
    }

    #[test]
    fn weak_norm_permutation_invariant() {
        let e = l2(3);
        let rows: Vec<&[f64]> =
            vec![&[1.0, 0.2, -0.5], &[0.0, 1.5, 0.3], &[-0.7, 0.1, 0.9]];
        let f = ffam(e, &rows);
        let mut rev = rows.clone();
        rev.reverse();
        let g = ffam(e, &rev);
        let p = Exponent::Finite(2.0);
        let a = weak_lp_norm(&f, p).unwrap();
        let b = weak_lp_norm(&g, p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn cohen_estimate_monotone_in_restarts() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let f = random_family(l2(3), 3, &mut rng);
        let p = Exponent::Finite(2.0);
        let mut prev = 0.0;
        for restarts in [2, 8, 32] {
            let cfg = AscentConfig { restarts, iters: 30, seed: 5 };
            let v = cohen_seq_norm_with(&f, p, &cfg).unwrap().value;
            assert!(v >= prev - 1e-12, "restarts {restarts}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn cohen_at_least_strong() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        for q in [Exponent::One, Exponent::Finite(2.0), Exponent::Infinity] {
            for _ in 0..20 {
                let space = NormedSpace::new(3, q);
                let f = random_family(space, 3, &mut rng);
                for p in [Exponent::Finite(4.0 / 3.0), Exponent::Finite(2.0)] {
                    let est = cohen_seq_norm(&f, p).unwrap();
                    let strong = strong_lp_norm(&f, p);
                    assert!(est.value >= strong - 1e-9, "{} < {strong}", est.value);
                }
            }
        }
    }

    #[test]
    fn deterministic_under_equal_seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        let f = random_family(NormedSpace::new(3, Exponent::Finite(4.0)), 3, &mut rng);
        let p = Exponent::Finite(4.0 / 3.0);
        let cfg = AscentConfig { restarts: 8, iters: 20, seed: 42 };
        let a = cohen_seq_norm_with(&f, p, &cfg).unwrap();
        let b = cohen_seq_norm_with(&f, p, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.witness, b.witness);
        let wa = weak_lp_norm_with(&f.as_functionals(), p, &cfg).unwrap();
        let wb = weak_lp_norm_with(&f.as_functionals(), p, &cfg).unwrap();
        assert_eq!(wa.to_bits(), wb.to_bits());
    }

    #[test]
    fn empty_and_mixed_families_rejected() {
        assert!(VectorFamily::new(vec![]).is_err());
        let a = Vector::zero(l2(2));
        let b = Vector::zero(NormedSpace::new(2, Exponent::One));
        assert!(VectorFamily::new(vec![a, b]).is_err());
        let shape_err = FunctionalFamily::with_shape(
            vec![Functional::zero(l2(2)); 3],
            Some(vec![2, 2]),
        );
        assert!(shape_err.is_err());
    }
}
