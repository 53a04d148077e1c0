//! Ratio evaluators, lower-bound searches, domination upper bounds and
//! independent oracles for the summing norms.
//!
//! A lower bound is always an evaluated ratio at explicit witness data, so
//! it is a genuine bound up to the accuracy of the weak norm in its
//! denominator (exact in the closed-form cases). An upper bound discretizes
//! the domination characterization: a probability measure on a sampled dual
//! ball must dominate the operator against a grid of functionals, and the
//! least admissible constant solves a small linear program. Grid upper
//! bounds are approximations, not certificates; the bracket carries the grid
//! sizes so a caller can refine.
//!
//! Cross-validation oracles: the adjoint identity (the linear summing norm
//! of an operator equals the absolutely summing norm of its adjoint at the
//! conjugate exponent) and exhaustive maximization over deterministic
//! product grids.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::sphere_grid;
use crate::linalg::spectral_norm;
use crate::operators::{AnyOperator, HomogeneousPolynomial, LinearOperator, MultilinearOperator};
use crate::seqnorms::{
    strong_lp_norm, weak_lp_norm_with, AscentConfig, FunctionalFamily, VectorFamily,
};
use crate::spaces::{
    dot, lq_norm, norming_functional, sign, steepest_unit, Exponent, Functional, NormedSpace,
    Vector,
};
use crate::util::derive_seed;

/// Which defining inequality a witness or bracket refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Linear summing norm d_p.
    Dp,
    /// Multilinear norm, flat functional family.
    Coh,
    /// Multilinear norm with multi-indexed functional families.
    MCoh,
    /// Homogeneous polynomial norm, diagonal data.
    Poly,
    /// Absolutely summing norm pi_q (oracle side).
    Pi,
    /// Linear norm with a general (r, q) exponent pair in the defining
    /// inequality.
    Gamma,
}

/// Denominator convention for the multilinear ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohForm {
    /// (sum_i prod_j |x_i^(j)|^p)^(1/p).
    Product,
    /// prod_j (sum_i |x_i^(j)|^(np))^(1/(np)).
    PowerNp,
}

/// Families of vectors (one per slot) and functionals at which a ratio is
/// evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessData {
    vector_families: Vec<VectorFamily>,
    functional_family: FunctionalFamily,
    flavor: Flavor,
}

impl WitnessData {
    pub fn new(
        vector_families: Vec<VectorFamily>,
        functional_family: FunctionalFamily,
        flavor: Flavor,
    ) -> Result<Self> {
        if vector_families.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let m = vector_families[0].len();
        for f in &vector_families {
            if f.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: f.len() });
            }
        }
        match flavor {
            Flavor::MCoh => {
                let n = vector_families.len();
                let want: Vec<usize> = vec![m; n];
                if functional_family.shape() != Some(want.as_slice()) {
                    return Err(Error::InconsistentWitness(format!(
                        "multi-indexed flavor needs functional shape {want:?}, got {:?}",
                        functional_family.shape()
                    )));
                }
            }
            _ => {
                if functional_family.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: functional_family.len(),
                    });
                }
            }
        }
        Ok(WitnessData { vector_families, functional_family, flavor })
    }

    pub fn vector_families(&self) -> &[VectorFamily] {
        &self.vector_families
    }

    pub fn functional_family(&self) -> &FunctionalFamily {
        &self.functional_family
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Family length (number of data points per slot).
    pub fn m(&self) -> usize {
        self.vector_families[0].len()
    }
}

/// Probability measure on sampled dual-ball atoms, the discrete stand-in for
/// the domination measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<Functional>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Functional>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Numerical("measure weight below zero".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("measure weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }
}

/// Search and grid sizes that produced a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Diagnostics {
    pub restarts: usize,
    pub iters: usize,
    pub phi_grid: usize,
    pub psi_grid: usize,
    pub x_grid: usize,
    pub simplex_steps: usize,
    pub gap: Option<f64>,
}

/// Lower bound with witness and, when a domination form exists, an upper
/// bound with its measure. An inverted bracket is reported by callers, never
/// clamped here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: Option<f64>,
    pub witness: Option<WitnessData>,
    pub measure: Option<DiscreteMeasure>,
    pub diagnostics: Diagnostics,
}

impl NormBracket {
    /// Combine a lower-only bracket with an upper-only one.
    pub fn merged(lower: NormBracket, upper: NormBracket) -> NormBracket {
        let mut d = lower.diagnostics;
        d.phi_grid = upper.diagnostics.phi_grid;
        d.psi_grid = upper.diagnostics.psi_grid;
        d.x_grid = upper.diagnostics.x_grid;
        d.simplex_steps = upper.diagnostics.simplex_steps;
        d.gap = upper.upper.map(|u| u - lower.lower);
        NormBracket {
            lower: lower.lower,
            upper: upper.upper,
            witness: lower.witness,
            measure: upper.measure,
            diagnostics: d,
        }
    }

    pub fn is_inverted(&self, rel_tol: f64) -> bool {
        match self.upper {
            Some(u) => self.lower > u * (1.0 + rel_tol) + 1e-12,
            None => false,
        }
    }
}

/// Budget for the alternating lower-bound search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub m: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { m: 4, restarts: 32, iters: 60, seed: 0 }
    }
}

/// Grid sizes for the domination upper bounds: `phi_grid` functionals to
/// dominate, `psi_grid` measure atoms, `x_grid` ascent starts per
/// functional in the multilinear case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub phi_grid: usize,
    pub psi_grid: usize,
    pub x_grid: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { phi_grid: 64, psi_grid: 64, x_grid: 32 }
    }
}

fn ratio_of(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        if num.abs() <= 1e-12 {
            Ok(0.0)
        } else {
            Err(Error::InconsistentWitness(format!(
                "numerator {num} against zero denominator"
            )))
        }
    } else {
        Ok(num / den)
    }
}

fn weak_default(fam: &FunctionalFamily, p: Exponent) -> Result<f64> {
    weak_lp_norm_with(fam, p, &AscentConfig::default())
}

/// Digit j of the row-major multi-index behind flat position k, for shape
/// (m, ..., m) of length n. Digit 0 varies slowest.
fn midx(k: usize, j: usize, n: usize, m: usize) -> usize {
    (k / m.pow((n - 1 - j) as u32)) % m
}

/// Linear ratio: sum_i |phi_i(T x_i)| over strong_p(x) . weak_{p*}(phi).
/// Any witness value is a valid lower bound for the linear summing norm.
pub fn dp_ratio(t: &LinearOperator, w: &WitnessData, p: Exponent) -> Result<f64> {
    gamma_ratio(t, w, Exponent::One, p, p.conjugate())
}

/// Generalized linear ratio with numerator exponent r and strong exponent q:
/// (sum_i |phi_i(T x_i)|^r)^(1/r) over strong_q(x) . weak_{pstar}(phi).
pub fn gamma_ratio(
    t: &LinearOperator,
    w: &WitnessData,
    r: Exponent,
    q: Exponent,
    pstar: Exponent,
) -> Result<f64> {
    if w.vector_families.len() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: w.vector_families.len() });
    }
    if pstar.is_one() {
        return Err(Error::ExponentRange { got: 1.0, required: "(1, inf]" });
    }
    let fam = &w.vector_families[0];
    check_spaces(&[t.domain], &[fam], &w.functional_family, t.codomain)?;
    let num_terms: Vec<f64> = fam
        .members()
        .iter()
        .zip(w.functional_family.members())
        .map(|(x, phi)| dot(&phi.coords, &t.apply_coords(&x.coords)))
        .collect();
    let num = lq_norm(&num_terms, r);
    let den = strong_lp_norm(fam, q) * weak_default(&w.functional_family, pstar)?;
    ratio_of(num, den)
}

/// Multilinear ratio with the chosen denominator form.
pub fn coh_ratio(
    t: &MultilinearOperator,
    w: &WitnessData,
    p: Exponent,
    form: CohForm,
) -> Result<f64> {
    let n = t.degree();
    if w.vector_families.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: w.vector_families.len() });
    }
    if p.is_infinite() {
        return Err(Error::ExponentRange { got: f64::INFINITY, required: "[1, inf)" });
    }
    check_spaces(&t.domains, &w.vector_families, &w.functional_family, t.codomain)?;
    let m = w.m();
    let mut num = 0.0;
    for i in 0..m {
        let args: Vec<&[f64]> =
            w.vector_families.iter().map(|f| f.members()[i].coords.as_slice()).collect();
        let img = t.apply_coords(&args);
        num += dot(&w.functional_family.members()[i].coords, &img).abs();
    }
    let strong = match form {
        CohForm::Product => {
            let prods: Vec<f64> = (0..m)
                .map(|i| w.vector_families.iter().map(|f| f.members()[i].norm()).product())
                .collect();
            lq_norm(&prods, p)
        }
        CohForm::PowerNp => {
            let np = Exponent::new(n as f64 * p.value())?;
            w.vector_families.iter().map(|f| strong_lp_norm(f, np)).product()
        }
    };
    let den = strong * weak_default(&w.functional_family, p.conjugate())?;
    ratio_of(num, den)
}

/// Multi-indexed multilinear ratio. The functional family carries shape
/// (m, ..., m); flat position k addresses the tuple whose slot-j vector is
/// member midx(k, j) of family j.
pub fn mcoh_ratio(t: &MultilinearOperator, w: &WitnessData, p: Exponent) -> Result<f64> {
    let n = t.degree();
    if w.vector_families.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: w.vector_families.len() });
    }
    if p.is_infinite() {
        return Err(Error::ExponentRange { got: f64::INFINITY, required: "[1, inf)" });
    }
    let m = w.m();
    let want: Vec<usize> = vec![m; n];
    if w.functional_family.shape() != Some(want.as_slice()) {
        return Err(Error::InconsistentWitness(format!(
            "expected functional shape {want:?}, got {:?}",
            w.functional_family.shape()
        )));
    }
    check_spaces(&t.domains, &w.vector_families, &w.functional_family, t.codomain)?;
    let mut num = 0.0;
    for (k, phi) in w.functional_family.members().iter().enumerate() {
        let args: Vec<&[f64]> = (0..n)
            .map(|j| w.vector_families[j].members()[midx(k, j, n, m)].coords.as_slice())
            .collect();
        num += dot(&phi.coords, &t.apply_coords(&args)).abs();
    }
    let strong: f64 = w.vector_families.iter().map(|f| strong_lp_norm(f, p)).product();
    let den = strong * weak_default(&w.functional_family, p.conjugate())?;
    ratio_of(num, den)
}

/// Polynomial ratio on diagonal data:
/// sum_i |phi_i(P(x_i))| over (sum_i |x_i|^(np))^(1/p) . weak_{p*}(phi).
///
/// The denominator is computed as the n-fold product of the strong np-norm,
/// which coincides with (sum |x|^(np))^(1/p) and matches the power-np
/// multilinear denominator fold for replicated slot data bit for bit.
pub fn poly_ratio(pol: &HomogeneousPolynomial, w: &WitnessData, p: Exponent) -> Result<f64> {
    let n = pol.degree;
    if n == 0 {
        return Err(Error::DegreeRange { k: 0, n: 0 });
    }
    if w.vector_families.len() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: w.vector_families.len() });
    }
    if p.is_infinite() {
        return Err(Error::ExponentRange { got: f64::INFINITY, required: "[1, inf)" });
    }
    let fam = &w.vector_families[0];
    check_spaces(&[pol.domain], &[fam], &w.functional_family, pol.codomain)?;
    let num: f64 = fam
        .members()
        .iter()
        .zip(w.functional_family.members())
        .map(|(x, phi)| dot(&phi.coords, &pol.apply_coords(&x.coords)).abs())
        .sum();
    let np = Exponent::new(n as f64 * p.value())?;
    let factor = strong_lp_norm(fam, np);
    let strong: f64 = (0..n).map(|_| factor).product();
    let den = strong * weak_default(&w.functional_family, p.conjugate())?;
    ratio_of(num, den)
}

fn check_spaces(
    domains: &[NormedSpace],
    fams: &[impl std::borrow::Borrow<VectorFamily>],
    funcs: &FunctionalFamily,
    codomain: NormedSpace,
) -> Result<()> {
    for (d, f) in domains.iter().zip(fams) {
        if f.borrow().space() != *d {
            return Err(Error::SpaceMismatch(format!(
                "slot expects {:?}, family lives in {:?}",
                d,
                f.borrow().space()
            )));
        }
    }
    if funcs.space() != codomain {
        return Err(Error::SpaceMismatch(format!(
            "functionals act on {:?}, operator lands in {:?}",
            funcs.space(),
            codomain
        )));
    }
    Ok(())
}

struct SearchCtx<'a> {
    op: &'a AnyOperator,
    flavor: Flavor,
    r: Exponent,
    strong_q: Exponent,
    weak_p: Exponent,
    m: usize,
    ndeg: usize,
    nslots: usize,
    domains: Vec<NormedSpace>,
    codomain: NormedSpace,
    adjoint: Option<LinearOperator>,
    polarized: Option<MultilinearOperator>,
    nfuncs: usize,
    weak_cfg: AscentConfig,
}

impl SearchCtx<'_> {
    fn image_coords(&self, vectors: &[Vec<Vector>], k: usize) -> Vec<f64> {
        match (self.op, self.flavor) {
            (AnyOperator::Linear(t), _) => t.apply_coords(&vectors[0][k].coords),
            (AnyOperator::Polynomial(p), _) => p.apply_coords(&vectors[0][k].coords),
            (AnyOperator::Multilinear(t), Flavor::MCoh) => {
                let args: Vec<&[f64]> = (0..self.nslots)
                    .map(|j| vectors[j][midx(k, j, self.nslots, self.m)].coords.as_slice())
                    .collect();
                t.apply_coords(&args)
            }
            (AnyOperator::Multilinear(t), _) => {
                let args: Vec<&[f64]> =
                    (0..self.nslots).map(|j| vectors[j][k].coords.as_slice()).collect();
                t.apply_coords(&args)
            }
        }
    }

    fn strong_denom(&self, vectors: &[Vec<Vector>]) -> f64 {
        match self.flavor {
            Flavor::Dp | Flavor::Gamma | Flavor::Pi => {
                let norms: Vec<f64> = vectors[0].iter().map(|x| x.norm()).collect();
                lq_norm(&norms, self.strong_q)
            }
            Flavor::Coh => {
                let prods: Vec<f64> = (0..self.m)
                    .map(|i| vectors.iter().map(|f| f[i].norm()).product())
                    .collect();
                lq_norm(&prods, self.strong_q)
            }
            Flavor::MCoh => vectors
                .iter()
                .map(|f| {
                    let norms: Vec<f64> = f.iter().map(|x| x.norm()).collect();
                    lq_norm(&norms, self.strong_q)
                })
                .product(),
            Flavor::Poly => {
                let norms: Vec<f64> = vectors[0].iter().map(|x| x.norm()).collect();
                let factor = lq_norm(&norms, self.strong_q);
                (0..self.ndeg).map(|_| factor).product()
            }
        }
    }

    fn slot_gradient(
        &self,
        vectors: &[Vec<Vector>],
        phi: &Functional,
        j: usize,
        k: usize,
    ) -> Vec<f64> {
        match (self.op, self.flavor) {
            (AnyOperator::Linear(_), _) => {
                self.adjoint.as_ref().expect("linear search").apply_coords(&phi.coords)
            }
            (AnyOperator::Polynomial(_), _) => {
                let pol = self.polarized.as_ref().expect("poly search");
                let args = vec![vectors[0][k].clone(); self.ndeg];
                pol.gradient_in_slot(0, &args, phi)
            }
            (AnyOperator::Multilinear(t), Flavor::MCoh) => {
                let args: Vec<Vector> = (0..self.nslots)
                    .map(|jj| vectors[jj][midx(k, jj, self.nslots, self.m)].clone())
                    .collect();
                t.gradient_in_slot(j, &args, phi)
            }
            (AnyOperator::Multilinear(t), _) => {
                let args: Vec<Vector> =
                    (0..self.nslots).map(|jj| vectors[jj][k].clone()).collect();
                t.gradient_in_slot(j, &args, phi)
            }
        }
    }

    fn affected(&self, j: usize, i: usize) -> Vec<usize> {
        match self.flavor {
            Flavor::MCoh => (0..self.nfuncs)
                .filter(|&k| midx(k, j, self.nslots, self.m) == i)
                .collect(),
            _ => vec![i],
        }
    }

    fn weak_of(&self, phis: &[Functional]) -> Result<f64> {
        let fam = FunctionalFamily::new(phis.to_vec())?;
        weak_lp_norm_with(&fam, self.weak_p, &self.weak_cfg)
    }

    fn numerator(&self, terms: &[f64]) -> f64 {
        lq_norm(terms, self.r)
    }
}

fn subgradient_weights(terms: &[f64], r: Exponent) -> Vec<f64> {
    match r {
        Exponent::One => terms.iter().map(|&t| sign(t)).collect(),
        Exponent::Infinity => {
            let mut k = 0;
            for (i, t) in terms.iter().enumerate() {
                if t.abs() > terms[k].abs() {
                    k = i;
                }
            }
            let mut w = vec![0.0; terms.len()];
            w[k] = sign(terms[k]);
            w
        }
        Exponent::Finite(rv) => {
            let n = lq_norm(terms, r);
            if n == 0.0 {
                return vec![1.0; terms.len()];
            }
            terms.iter().map(|&t| sign(t) * (t.abs() / n).powf(rv - 1.0)).collect()
        }
    }
}

/// Alternating maximization of a flavor ratio: exact per-index steepest
/// updates of the unit-sphere vectors, then a subgradient step on the flat
/// functional array renormalized by its recomputed weak norm. Restart 0 is
/// the coordinate-basis family with the duality-witness functionals; the
/// remaining restarts are random. The reported lower bound is the honestly
/// re-evaluated ratio at the best witness found.
pub fn lower_bound_search(
    op: &AnyOperator,
    flavor: Flavor,
    p: Exponent,
    cfg: &SearchConfig,
) -> Result<NormBracket> {
    match (flavor, op) {
        (Flavor::Dp, AnyOperator::Linear(_))
        | (Flavor::Coh, AnyOperator::Multilinear(_))
        | (Flavor::MCoh, AnyOperator::Multilinear(_))
        | (Flavor::Poly, AnyOperator::Polynomial(_)) => {}
        _ => {
            return Err(Error::SpaceMismatch(format!(
                "flavor {flavor:?} does not apply to this operator kind"
            )))
        }
    }
    if p.is_infinite() {
        return Err(Error::ExponentRange { got: f64::INFINITY, required: "[1, inf)" });
    }
    let strong_q = match (flavor, op) {
        (Flavor::Poly, AnyOperator::Polynomial(pol)) => {
            if pol.degree == 0 {
                return Err(Error::DegreeRange { k: 0, n: 0 });
            }
            Exponent::new(pol.degree as f64 * p.value())?
        }
        _ => p,
    };
    run_search(op, flavor, Exponent::One, strong_q, p.conjugate(), p, cfg)
}

/// Lower-bound search for the generalized linear inequality with numerator
/// exponent `r`, strong exponent `q` and weak exponent `pstar`.
pub fn gamma_lower_search(
    t: &LinearOperator,
    r: Exponent,
    q: Exponent,
    pstar: Exponent,
    cfg: &SearchConfig,
) -> Result<NormBracket> {
    if pstar.is_one() {
        return Err(Error::ExponentRange { got: 1.0, required: "(1, inf]" });
    }
    let op = AnyOperator::Linear(t.clone());
    run_search(&op, Flavor::Gamma, r, q, pstar, q, cfg)
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    op: &AnyOperator,
    flavor: Flavor,
    r: Exponent,
    strong_q: Exponent,
    weak_p: Exponent,
    p: Exponent,
    cfg: &SearchConfig,
) -> Result<NormBracket> {
    if cfg.m == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let ndeg = op.degree().max(1);
    let domains = match flavor {
        Flavor::Poly | Flavor::Dp | Flavor::Gamma | Flavor::Pi => vec![op.domains()[0]],
        _ => op.domains(),
    };
    let nslots = domains.len();
    let nfuncs = match flavor {
        Flavor::MCoh => cfg.m.pow(nslots as u32),
        _ => cfg.m,
    };
    let ctx = SearchCtx {
        op,
        flavor,
        r,
        strong_q,
        weak_p,
        m: cfg.m,
        ndeg,
        nslots,
        domains,
        codomain: op.codomain(),
        adjoint: match op {
            AnyOperator::Linear(t) => Some(t.adjoint()),
            _ => None,
        },
        polarized: match op {
            AnyOperator::Polynomial(pol) => Some(pol.polarize()),
            _ => None,
        },
        nfuncs,
        weak_cfg: AscentConfig { restarts: 8, iters: 40, seed: derive_seed(cfg.seed, 0x3EA1) },
    };

    let trivial = || -> Result<WitnessData> {
        let fams = ctx
            .domains
            .iter()
            .map(|d| {
                VectorFamily::new((0..ctx.m).map(|i| Vector::basis(*d, i % d.dim)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let shape = if flavor == Flavor::MCoh { Some(vec![ctx.m; ctx.nslots]) } else { None };
        let funcs = FunctionalFamily::with_shape(
            vec![Functional::zero(ctx.codomain); ctx.nfuncs],
            shape,
        )?;
        WitnessData::new(fams, funcs, flavor)
    };

    if op.is_zero() {
        return Ok(NormBracket {
            lower: 0.0,
            upper: None,
            witness: Some(trivial()?),
            measure: None,
            diagnostics: Diagnostics {
                restarts: cfg.restarts,
                iters: cfg.iters,
                ..Diagnostics::default()
            },
        });
    }

    let mut best_obj = 0.0f64;
    let mut best: Option<(Vec<Vec<Vector>>, Vec<Functional>)> = None;

    for restart in 0..cfg.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0xA5E0 + restart as u64));
        let mut vectors: Vec<Vec<Vector>> = if restart == 0 {
            ctx.domains
                .iter()
                .map(|d| (0..ctx.m).map(|i| Vector::basis(*d, i % d.dim)).collect())
                .collect()
        } else {
            ctx.domains
                .iter()
                .map(|d| {
                    (0..ctx.m)
                        .map(|_| {
                            let mut c: Vec<f64> =
                                (0..d.dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                            let n = lq_norm(&c, d.q);
                            if n < 1e-12 {
                                Vector::basis(*d, 0)
                            } else {
                                c.iter_mut().for_each(|v| *v /= n);
                                Vector { coords: c, space: *d }
                            }
                        })
                        .collect()
                })
                .collect()
        };

        let mut images: Vec<Vec<f64>> =
            (0..ctx.nfuncs).map(|k| ctx.image_coords(&vectors, k)).collect();

        let mut phis: Vec<Functional> = if restart == 0 {
            let sv = ctx.strong_q.value();
            images
                .iter()
                .map(|img| {
                    let v = Vector { coords: img.clone(), space: ctx.codomain };
                    match norming_functional(&v) {
                        Ok(f) => f.scale(v.norm().powf(sv - 1.0)),
                        Err(_) => Functional::zero(ctx.codomain),
                    }
                })
                .collect()
        } else {
            (0..ctx.nfuncs)
                .map(|_| Functional {
                    coords: (0..ctx.codomain.dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
                    space: ctx.codomain,
                })
                .collect()
        };

        let w = ctx.weak_of(&phis)?;
        if w == 0.0 {
            continue;
        }
        for f in phis.iter_mut() {
            f.coords.iter_mut().for_each(|c| *c /= w);
        }
        let mut terms: Vec<f64> =
            phis.iter().zip(&images).map(|(f, img)| dot(&f.coords, img)).collect();
        let mut obj = ctx.numerator(&terms) / ctx.strong_denom(&vectors);
        if obj > best_obj {
            best_obj = obj;
            best = Some((vectors.clone(), phis.clone()));
        }
        let mut prev = obj;

        for _it in 0..cfg.iters {
            let weights = subgradient_weights(&terms, ctx.r);
            let mut accepted = false;
            for j in 0..ctx.nslots {
                for i in 0..ctx.m {
                    let affected = ctx.affected(j, i);
                    let mut g = vec![0.0; ctx.domains[j].dim];
                    for &k in &affected {
                        let wk = weights[k];
                        if wk == 0.0 {
                            continue;
                        }
                        let gk = ctx.slot_gradient(&vectors, &phis[k], j, k);
                        for (gs, gv) in g.iter_mut().zip(&gk) {
                            *gs += wk * gv;
                        }
                    }
                    if g.iter().all(|&c| c == 0.0) {
                        continue;
                    }
                    let cand =
                        Vector { coords: steepest_unit(&g, ctx.domains[j].q), space: ctx.domains[j] };
                    let old_sum: f64 = affected.iter().map(|&k| terms[k].abs()).sum();
                    let prev_vec = std::mem::replace(&mut vectors[j][i], cand);
                    let mut new_imgs = Vec::with_capacity(affected.len());
                    let mut new_sum = 0.0;
                    for &k in &affected {
                        let img = ctx.image_coords(&vectors, k);
                        new_sum += dot(&phis[k].coords, &img).abs();
                        new_imgs.push(img);
                    }
                    if new_sum > old_sum {
                        for (&k, img) in affected.iter().zip(new_imgs) {
                            terms[k] = dot(&phis[k].coords, &img);
                            images[k] = img;
                        }
                        accepted = true;
                    } else {
                        vectors[j][i] = prev_vec;
                    }
                }
            }
            if accepted {
                obj = ctx.numerator(&terms) / ctx.strong_denom(&vectors);
                if obj > best_obj {
                    best_obj = obj;
                    best = Some((vectors.clone(), phis.clone()));
                }
            }

            let weights = subgradient_weights(&terms, ctx.r);
            let frob: f64 =
                phis.iter().flat_map(|f| f.coords.iter()).map(|c| c * c).sum::<f64>().sqrt();
            let mut grads: Vec<Vec<f64>> = Vec::with_capacity(ctx.nfuncs);
            let mut gn2 = 0.0;
            for (wk, img) in weights.iter().zip(&images) {
                let g: Vec<f64> = img.iter().map(|c| wk * c).collect();
                gn2 += g.iter().map(|c| c * c).sum::<f64>();
                grads.push(g);
            }
            let gn = gn2.sqrt();
            if gn == 0.0 {
                break;
            }
            let eta = 0.5 / (1.0 + _it as f64 / 4.0) * frob.max(1e-12) / gn;
            for (f, g) in phis.iter_mut().zip(&grads) {
                for (c, gv) in f.coords.iter_mut().zip(g) {
                    *c += eta * gv;
                }
            }
            let w = ctx.weak_of(&phis)?;
            if w == 0.0 {
                break;
            }
            for f in phis.iter_mut() {
                f.coords.iter_mut().for_each(|c| *c /= w);
            }
            for (t, (f, img)) in terms.iter_mut().zip(phis.iter().zip(&images)) {
                *t = dot(&f.coords, img);
            }
            obj = ctx.numerator(&terms) / ctx.strong_denom(&vectors);
            if obj > best_obj {
                best_obj = obj;
                best = Some((vectors.clone(), phis.clone()));
            }
            if !accepted && (obj - prev).abs() <= 1e-13 * prev.abs().max(1.0) {
                break;
            }
            prev = obj;
        }
    }

    let witness = match best {
        None => trivial()?,
        Some((vectors, phis)) => {
            let fams = vectors
                .into_iter()
                .map(VectorFamily::new)
                .collect::<Result<Vec<_>>>()?;
            let shape =
                if flavor == Flavor::MCoh { Some(vec![ctx.m; ctx.nslots]) } else { None };
            WitnessData::new(fams, FunctionalFamily::with_shape(phis, shape)?, flavor)?
        }
    };

    let lower = evaluate_witness(op, &witness, flavor, r, strong_q, weak_p, p)?;
    Ok(NormBracket {
        lower,
        upper: None,
        witness: Some(witness),
        measure: None,
        diagnostics: Diagnostics {
            restarts: cfg.restarts,
            iters: cfg.iters,
            ..Diagnostics::default()
        },
    })
}

fn evaluate_witness(
    op: &AnyOperator,
    w: &WitnessData,
    flavor: Flavor,
    r: Exponent,
    strong_q: Exponent,
    weak_p: Exponent,
    p: Exponent,
) -> Result<f64> {
    match (flavor, op) {
        (Flavor::Dp, AnyOperator::Linear(t)) => dp_ratio(t, w, p),
        (Flavor::Gamma, AnyOperator::Linear(t)) => gamma_ratio(t, w, r, strong_q, weak_p),
        (Flavor::Coh, AnyOperator::Multilinear(t)) => {
            let a = coh_ratio(t, w, p, CohForm::Product)?;
            let b = coh_ratio(t, w, p, CohForm::PowerNp)?;
            Ok(a.max(b))
        }
        (Flavor::MCoh, AnyOperator::Multilinear(t)) => mcoh_ratio(t, w, p),
        (Flavor::Poly, AnyOperator::Polynomial(pol)) => poly_ratio(pol, w, p),
        _ => Err(Error::SpaceMismatch("flavor/operator mismatch".into())),
    }
}

/// One-phase primal simplex for: maximize sum(y) subject to G y <= 1
/// componentwise, y >= 0. Returns (value, constraint duals, pivot count).
/// The slack basis is immediately feasible; Bland's rule prevents cycling.
fn simplex_max(g: &[Vec<f64>]) -> Result<(f64, Vec<f64>, usize)> {
    let nc = g.len();
    let nv = if nc == 0 { 0 } else { g[0].len() };
    if nc == 0 || nv == 0 {
        return Err(Error::DegenerateGrid);
    }
    let width = nv + nc + 1;
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(nc);
    for (i, row) in g.iter().enumerate() {
        let mut r = vec![0.0; width];
        r[..nv].copy_from_slice(row);
        r[nv + i] = 1.0;
        r[width - 1] = 1.0;
        tab.push(r);
    }
    let mut obj = vec![0.0; width];
    for slot in obj.iter_mut().take(nv) {
        *slot = -1.0;
    }
    let mut basis: Vec<usize> = (nv..nv + nc).collect();
    let mut steps = 0usize;
    loop {
        let Some(enter) = obj[..nv + nc].iter().position(|&c| c < -1e-9) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] > 1e-12 {
                let ratio = row[width - 1] / row[enter];
                let better = ratio < best_ratio - 1e-15
                    || (ratio <= best_ratio + 1e-15
                        && leave.map(|l| basis[i] < basis[l]).unwrap_or(true));
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::DegenerateGrid);
        };
        let pivot = tab[leave][enter];
        for c in tab[leave].iter_mut() {
            *c /= pivot;
        }
        for i in 0..nc {
            if i != leave && tab[i][enter].abs() > 0.0 {
                let f = tab[i][enter];
                for c in 0..width {
                    tab[i][c] -= f * tab[leave][c];
                }
            }
        }
        let f: f64 = obj[enter];
        if f.abs() > 0.0 {
            for c in 0..width {
                obj[c] -= f * tab[leave][c];
            }
        }
        basis[leave] = enter;
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Numerical("simplex pivot budget exhausted".into()));
        }
    }
    let value = obj[width - 1];
    let duals: Vec<f64> = (0..nc).map(|k| obj[nv + k].max(0.0)).collect();
    Ok((value, duals, steps))
}

/// Scalar form norm sup over unit tuples of |phi(T(x_1, ..., x_n))| by
/// alternating exact per-slot updates from deterministic sphere starts.
fn multilinear_form_norm(
    t: &MultilinearOperator,
    phi: &Functional,
    starts: usize,
    iters: usize,
) -> f64 {
    let n = t.degree();
    let grids: Vec<Vec<Vec<f64>>> =
        t.domains.iter().map(|d| sphere_grid(*d, starts.max(1))).collect();
    let mut best = 0.0f64;
    for s in 0..starts.max(1) {
        let mut tuple: Vec<Vector> = (0..n)
            .map(|j| Vector {
                coords: grids[j][s % grids[j].len()].clone(),
                space: t.domains[j],
            })
            .collect();
        let args: Vec<&[f64]> = tuple.iter().map(|x| x.coords.as_slice()).collect();
        let mut val = dot(&phi.coords, &t.apply_coords(&args)).abs();
        for _ in 0..iters {
            let mut improved = false;
            for j in 0..n {
                let g = t.gradient_in_slot(j, &tuple, phi);
                if g.iter().all(|&c| c == 0.0) {
                    continue;
                }
                let cand = Vector { coords: steepest_unit(&g, t.domains[j].q), space: t.domains[j] };
                let old = tuple[j].clone();
                tuple[j] = cand;
                let args: Vec<&[f64]> = tuple.iter().map(|x| x.coords.as_slice()).collect();
                let v = dot(&phi.coords, &t.apply_coords(&args)).abs();
                if v > val {
                    val = v;
                    improved = true;
                } else {
                    tuple[j] = old;
                }
            }
            if !improved {
                break;
            }
        }
        if val > best {
            best = val;
        }
    }
    best
}

/// Operator norm of a linear map: exact for Euclidean-to-anything via the
/// largest singular value when both sides are Euclidean, exact by column or
/// vertex enumeration for l_1 / l_inf domains, otherwise monotone
/// conditional-gradient ascent from deterministic sphere starts.
pub fn operator_norm(t: &LinearOperator) -> f64 {
    let d = t.domain.dim;
    if t.matrix.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    let codomain_norm = |coords: &[f64]| lq_norm(coords, t.codomain.q);
    if t.domain.q == Exponent::One {
        return (0..d)
            .map(|j| {
                let col: Vec<f64> =
                    (0..t.codomain.dim).map(|f| t.matrix[f * d + j]).collect();
                codomain_norm(&col)
            })
            .fold(0.0, f64::max);
    }
    if t.domain.q == Exponent::Infinity && d <= 16 {
        let mut best = 0.0f64;
        for bits in 0..(1u64 << (d - 1)) {
            let x: Vec<f64> = (0..d)
                .map(|j| if j > 0 && bits >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            best = best.max(codomain_norm(&t.apply_coords(&x)));
        }
        return best;
    }
    if t.domain.q == Exponent::Finite(2.0) && t.codomain.q == Exponent::Finite(2.0) {
        return spectral_norm(t.codomain.dim, d, &t.matrix).0;
    }
    let adj = t.adjoint();
    let mut best = 0.0f64;
    for start in sphere_grid(t.domain, 24) {
        let mut x = start;
        let mut val = codomain_norm(&t.apply_coords(&x));
        for _ in 0..50 {
            let img = t.apply_coords(&x);
            if img.iter().all(|&c| c == 0.0) {
                break;
            }
            let phi = steepest_unit(&img, t.codomain.q.conjugate());
            let g = adj.apply_coords(&phi);
            if g.iter().all(|&c| c == 0.0) {
                break;
            }
            let cand = steepest_unit(&g, t.domain.q);
            let v = codomain_norm(&t.apply_coords(&cand));
            if v <= val * (1.0 + 1e-14) {
                break;
            }
            x = cand;
            val = v;
        }
        if val > best {
            best = val;
        }
    }
    best
}

/// Grid approximation of the least domination constant: for every grid
/// functional phi, a simplex-weighted atom family must satisfy
/// s(phi)^(p*) <= C^(p*) sum_k mu_k |psi_k(phi)|^(p*), where s(phi) is the
/// norm of the composed scalar form. Solved as a matrix game by one linear
/// program; polynomials are bounded through their symmetric multilinear
/// companion.
pub fn pietsch_upper_bound(
    op: &AnyOperator,
    p: Exponent,
    grids: &GridConfig,
) -> Result<NormBracket> {
    let pstar = match p.conjugate() {
        Exponent::Finite(v) => v,
        _ => {
            return Err(Error::ExponentRange { got: p.value(), required: "(1, inf)" });
        }
    };
    if let AnyOperator::Polynomial(pol) = op {
        if pol.degree == 0 {
            return Err(Error::DegreeRange { k: 0, n: 0 });
        }
        let companion = AnyOperator::Multilinear(pol.polarize());
        return pietsch_upper_bound(&companion, p, grids);
    }
    let codomain = op.codomain();
    let atoms_space = codomain.dual();
    if op.is_zero() {
        let atom = Functional { coords: Vector::basis(codomain, 0).coords, space: atoms_space };
        return Ok(NormBracket {
            lower: 0.0,
            upper: Some(0.0),
            witness: None,
            measure: Some(DiscreteMeasure::new(vec![atom], vec![1.0])?),
            diagnostics: Diagnostics {
                phi_grid: grids.phi_grid,
                psi_grid: grids.psi_grid,
                x_grid: grids.x_grid,
                ..Diagnostics::default()
            },
        });
    }

    let phi_pts = sphere_grid(codomain.dual(), grids.phi_grid.max(1));
    let s_vals: Vec<f64> = phi_pts
        .iter()
        .map(|phi| match op {
            AnyOperator::Linear(t) => {
                lq_norm(&t.adjoint().apply_coords(phi), t.domain.q.conjugate())
            }
            AnyOperator::Multilinear(t) => {
                let f = Functional { coords: phi.clone(), space: codomain };
                multilinear_form_norm(t, &f, grids.x_grid.max(4), 40)
            }
            AnyOperator::Polynomial(_) => unreachable!("handled above"),
        })
        .collect();
    let smax = s_vals.iter().fold(0.0f64, |m, &v| m.max(v));
    if smax == 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let atoms = sphere_grid(codomain, grids.psi_grid.max(1));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut kept = 0usize;
    for (phi, &s) in phi_pts.iter().zip(&s_vals) {
        if s <= 1e-12 * smax {
            continue;
        }
        let row: Vec<f64> =
            atoms.iter().map(|z| (dot(z, phi).abs() / s).powf(pstar)).collect();
        if row.iter().all(|&a| a == 0.0) {
            return Err(Error::DegenerateGrid);
        }
        rows.push(row);
        kept += 1;
    }
    if kept == 0 {
        return Err(Error::DegenerateGrid);
    }
    // Constraints run over atoms, variables over kept functionals.
    let g: Vec<Vec<f64>> = (0..atoms.len())
        .map(|k| rows.iter().map(|r| r[k]).collect())
        .collect();
    let (value, duals, steps) = simplex_max(&g)?;
    if value <= 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let upper = value.powf(1.0 / pstar) + 1e-8;
    let total: f64 = duals.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let mut m_atoms = Vec::new();
    let mut m_weights = Vec::new();
    for (z, &w) in atoms.iter().zip(&duals) {
        if w / total > 1e-15 {
            m_atoms.push(Functional { coords: z.clone(), space: atoms_space });
            m_weights.push(w / total);
        }
    }
    let wsum: f64 = m_weights.iter().sum();
    m_weights.iter_mut().for_each(|w| *w /= wsum);
    Ok(NormBracket {
        lower: 0.0,
        upper: Some(upper),
        witness: None,
        measure: Some(DiscreteMeasure::new(m_atoms, m_weights)?),
        diagnostics: Diagnostics {
            phi_grid: grids.phi_grid,
            psi_grid: grids.psi_grid,
            x_grid: grids.x_grid,
            simplex_steps: steps,
            ..Diagnostics::default()
        },
    })
}

/// Bracket for the absolutely q-summing norm: ratio search for the lower
/// end, dominated by a measure on the sampled dual ball of the domain for
/// the upper end.
pub fn pi_q_oracle(s: &LinearOperator, q: Exponent, grids: &GridConfig) -> Result<NormBracket> {
    let qv = match q {
        Exponent::Finite(v) => v,
        _ => {
            return Err(Error::ExponentRange { got: q.value(), required: "(1, inf)" });
        }
    };
    let zero = s.matrix.iter().all(|&c| c == 0.0);
    let (lower, fam) = pi_lower_search(s, q, 24, 40, 0)?;
    let witness = pi_witness(s, fam)?;
    if zero {
        return Ok(NormBracket {
            lower: 0.0,
            upper: Some(0.0),
            witness: Some(witness),
            measure: None,
            diagnostics: Diagnostics {
                phi_grid: grids.phi_grid,
                psi_grid: grids.psi_grid,
                ..Diagnostics::default()
            },
        });
    }

    let u_pts = sphere_grid(s.domain, grids.phi_grid.max(1));
    let s_vals: Vec<f64> = u_pts.iter().map(|u| lq_norm(&s.apply_coords(u), s.codomain.q)).collect();
    let smax = s_vals.iter().fold(0.0f64, |m, &v| m.max(v));
    if smax == 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let atoms = sphere_grid(s.domain.dual(), grids.psi_grid.max(1));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (u, &su) in u_pts.iter().zip(&s_vals) {
        if su <= 1e-12 * smax {
            continue;
        }
        let row: Vec<f64> = atoms.iter().map(|z| (dot(z, u).abs() / su).powf(qv)).collect();
        if row.iter().all(|&a| a == 0.0) {
            return Err(Error::DegenerateGrid);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::DegenerateGrid);
    }
    let g: Vec<Vec<f64>> =
        (0..atoms.len()).map(|k| rows.iter().map(|r| r[k]).collect()).collect();
    let (value, duals, steps) = simplex_max(&g)?;
    if value <= 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let upper = value.powf(1.0 / qv) + 1e-8;
    let total: f64 = duals.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let mut m_atoms = Vec::new();
    let mut m_weights = Vec::new();
    for (z, &w) in atoms.iter().zip(&duals) {
        if w / total > 1e-15 {
            m_atoms.push(Functional { coords: z.clone(), space: s.domain });
            m_weights.push(w / total);
        }
    }
    let wsum: f64 = m_weights.iter().sum();
    m_weights.iter_mut().for_each(|w| *w /= wsum);
    Ok(NormBracket {
        lower,
        upper: Some(upper),
        witness: Some(witness),
        measure: Some(DiscreteMeasure::new(m_atoms, m_weights)?),
        diagnostics: Diagnostics {
            phi_grid: grids.phi_grid,
            psi_grid: grids.psi_grid,
            simplex_steps: steps,
            ..Diagnostics::default()
        },
    })
}

fn pi_witness(s: &LinearOperator, fam: VectorFamily) -> Result<WitnessData> {
    let funcs: Vec<Functional> = fam
        .members()
        .iter()
        .map(|x| {
            let img = Vector { coords: s.apply_coords(&x.coords), space: s.codomain };
            norming_functional(&img).unwrap_or_else(|_| Functional::zero(s.codomain))
        })
        .collect();
    WitnessData::new(vec![fam], FunctionalFamily::new(funcs)?, Flavor::Pi)
}

fn pi_lower_search(
    s: &LinearOperator,
    q: Exponent,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<(f64, VectorFamily)> {
    let e = s.domain;
    let m = e.dim;
    let qv = q.value();
    let adj = s.adjoint();
    let weak_cfg = AscentConfig { restarts: 8, iters: 40, seed: derive_seed(seed, 0x91A) };
    let weak_of = |members: &[Vector]| -> Result<f64> {
        let fam = VectorFamily::new(members.to_vec())?;
        weak_lp_norm_with(&fam.as_functionals(), q, &weak_cfg)
    };
    let strong_images = |members: &[Vector]| -> f64 {
        let norms: Vec<f64> =
            members.iter().map(|x| lq_norm(&s.apply_coords(&x.coords), s.codomain.q)).collect();
        lq_norm(&norms, q)
    };

    let mut best_val = 0.0f64;
    let mut best: Option<Vec<Vector>> = None;
    for restart in 0..restarts.max(1) {
        let mut members: Vec<Vector> = if restart == 0 {
            (0..m).map(|i| Vector::basis(e, i)).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0xB100 + restart as u64));
            (0..m)
                .map(|_| {
                    let mut c: Vec<f64> =
                        (0..e.dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                    let n = lq_norm(&c, e.q);
                    if n < 1e-12 {
                        Vector::basis(e, 0)
                    } else {
                        c.iter_mut().for_each(|v| *v /= n);
                        Vector { coords: c, space: e }
                    }
                })
                .collect()
        };
        let w = weak_of(&members)?;
        if w == 0.0 {
            continue;
        }
        for x in members.iter_mut() {
            x.coords.iter_mut().for_each(|c| *c /= w);
        }
        let mut val = strong_images(&members);
        if val > best_val {
            best_val = val;
            best = Some(members.clone());
        }
        for it in 0..iters {
            let n_val = strong_images(&members);
            if n_val == 0.0 {
                break;
            }
            let frob: f64 =
                members.iter().flat_map(|x| x.coords.iter()).map(|c| c * c).sum::<f64>().sqrt();
            let mut grads = Vec::with_capacity(m);
            let mut gn2 = 0.0;
            for x in &members {
                let img = s.apply_coords(&x.coords);
                let imgn = lq_norm(&img, s.codomain.q);
                let g: Vec<f64> = if imgn == 0.0 {
                    vec![0.0; e.dim]
                } else {
                    let phi = steepest_unit(&img, s.codomain.q.conjugate());
                    let back = adj.apply_coords(&phi);
                    let wt = (imgn / n_val).powf(qv - 1.0);
                    back.iter().map(|c| wt * c).collect()
                };
                gn2 += g.iter().map(|c| c * c).sum::<f64>();
                grads.push(g);
            }
            let gn = gn2.sqrt();
            if gn == 0.0 {
                break;
            }
            let eta = 0.5 / (1.0 + it as f64 / 4.0) * frob.max(1e-12) / gn;
            for (x, g) in members.iter_mut().zip(&grads) {
                for (c, gv) in x.coords.iter_mut().zip(g) {
                    *c += eta * gv;
                }
            }
            let w = weak_of(&members)?;
            if w == 0.0 {
                break;
            }
            for x in members.iter_mut() {
                x.coords.iter_mut().for_each(|c| *c /= w);
            }
            let v = strong_images(&members);
            if v > best_val {
                best_val = v;
                best = Some(members.clone());
            }
            if (v - val).abs() <= 1e-13 * val.abs().max(1.0) {
                break;
            }
            val = v;
        }
    }
    let members = best.unwrap_or_else(|| (0..m).map(|i| Vector::basis(e, i)).collect());
    let w = weak_of(&members)?;
    let lower = if w == 0.0 { 0.0 } else { strong_images(&members) / w };
    Ok((lower, VectorFamily::new(members)?))
}

/// Independent oracle for the linear summing norm: the absolutely summing
/// bracket of the adjoint at the conjugate exponent.
pub fn dp_via_adjoint(t: &LinearOperator, p: Exponent, grids: &GridConfig) -> Result<NormBracket> {
    match p {
        Exponent::Finite(_) => {}
        _ => {
            return Err(Error::ExponentRange { got: p.value(), required: "(1, inf)" });
        }
    }
    pi_q_oracle(&t.adjoint(), p.conjugate(), grids)
}

/// Tighter of the two linear upper bounds: direct domination and the
/// adjoint oracle.
pub fn dp_upper_bound(t: &LinearOperator, p: Exponent, grids: &GridConfig) -> Result<NormBracket> {
    let direct = pietsch_upper_bound(&AnyOperator::Linear(t.clone()), p, grids)?;
    let via_adjoint = dp_via_adjoint(t, p, grids)?;
    let du = direct.upper.unwrap_or(f64::INFINITY);
    let au = via_adjoint.upper.unwrap_or(f64::INFINITY);
    Ok(if du <= au { direct } else { via_adjoint })
}

const BRUTE_BUDGET: u64 = 200_000_000;

fn checked_pow(base: usize, exp: u32) -> Option<u64> {
    (base as u64).checked_pow(exp)
}

/// Exhaustive maximization of the flavor ratio over deterministic product
/// grids of sphere points for both the vectors and the functionals. The
/// returned value is a lower bound converging to the norm as `resolution`
/// grows. Work is bounded by an evaluation budget; exceeding it is an
/// error, never a silent truncation.
pub fn brute_force_oracle(
    op: &AnyOperator,
    flavor: Flavor,
    p: Exponent,
    resolution: usize,
    m: usize,
) -> Result<f64> {
    if m == 0 || resolution == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if p.is_infinite() {
        return Err(Error::ExponentRange { got: f64::INFINITY, required: "[1, inf)" });
    }
    if op.is_zero() {
        return Ok(0.0);
    }
    let codomain = op.codomain();
    let pstar = p.conjugate();
    let phigrid = sphere_grid(codomain.dual(), resolution);
    let gphi = phigrid.len();
    let weak_of = |choice: &[usize]| -> Result<f64> {
        let members: Vec<Functional> = choice
            .iter()
            .map(|&a| Functional { coords: phigrid[a].clone(), space: codomain })
            .collect();
        weak_default(&FunctionalFamily::new(members)?, pstar)
    };

    match (op, flavor) {
        (AnyOperator::Linear(t), Flavor::Dp) => {
            let required = checked_pow(gphi, m as u32)
                .and_then(|a| a.checked_add((gphi * resolution) as u64))
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            if required > BRUTE_BUDGET {
                return Err(Error::BudgetExceeded { required, budget: BRUTE_BUDGET });
            }
            let xgrid = sphere_grid(t.domain, resolution);
            let images: Vec<Vec<f64>> = xgrid.iter().map(|x| t.apply_coords(x)).collect();
            let mut best_term = vec![0.0f64; gphi];
            let mut best_x = vec![0usize; gphi];
            for (a, phi) in phigrid.iter().enumerate() {
                for (b, img) in images.iter().enumerate() {
                    let v = dot(phi, img).abs();
                    if v > best_term[a] {
                        best_term[a] = v;
                        best_x[a] = b;
                    }
                }
            }
            let pick = scan_combos(gphi, m, &best_term, &weak_of)?;
            let Some(choice) = pick else { return Ok(0.0) };
            let fam = VectorFamily::new(
                choice
                    .iter()
                    .map(|&a| Vector { coords: xgrid[best_x[a]].clone(), space: t.domain })
                    .collect(),
            )?;
            let funcs = FunctionalFamily::new(
                choice
                    .iter()
                    .map(|&a| Functional { coords: phigrid[a].clone(), space: codomain })
                    .collect(),
            )?;
            dp_ratio(t, &WitnessData::new(vec![fam], funcs, Flavor::Dp)?, p)
        }
        (AnyOperator::Polynomial(pol), Flavor::Poly) => {
            let required = checked_pow(gphi, m as u32)
                .and_then(|a| a.checked_add((gphi * resolution) as u64))
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            if required > BRUTE_BUDGET {
                return Err(Error::BudgetExceeded { required, budget: BRUTE_BUDGET });
            }
            let xgrid = sphere_grid(pol.domain, resolution);
            let images: Vec<Vec<f64>> = xgrid.iter().map(|x| pol.apply_coords(x)).collect();
            let mut best_term = vec![0.0f64; gphi];
            let mut best_x = vec![0usize; gphi];
            for (a, phi) in phigrid.iter().enumerate() {
                for (b, img) in images.iter().enumerate() {
                    let v = dot(phi, img).abs();
                    if v > best_term[a] {
                        best_term[a] = v;
                        best_x[a] = b;
                    }
                }
            }
            let pick = scan_combos(gphi, m, &best_term, &weak_of)?;
            let Some(choice) = pick else { return Ok(0.0) };
            let fam = VectorFamily::new(
                choice
                    .iter()
                    .map(|&a| Vector { coords: xgrid[best_x[a]].clone(), space: pol.domain })
                    .collect(),
            )?;
            let funcs = FunctionalFamily::new(
                choice
                    .iter()
                    .map(|&a| Functional { coords: phigrid[a].clone(), space: codomain })
                    .collect(),
            )?;
            poly_ratio(pol, &WitnessData::new(vec![fam], funcs, Flavor::Poly)?, p)
        }
        (AnyOperator::Multilinear(t), Flavor::Coh) => {
            let n = t.degree();
            let tuples = checked_pow(resolution, n as u32)
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            let required = checked_pow(gphi, m as u32)
                .and_then(|a| a.checked_add(gphi as u64 * tuples))
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            if required > BRUTE_BUDGET {
                return Err(Error::BudgetExceeded { required, budget: BRUTE_BUDGET });
            }
            let xgrids: Vec<Vec<Vec<f64>>> =
                t.domains.iter().map(|d| sphere_grid(*d, resolution)).collect();
            // Per functional, the best tuple is independent across indices.
            let mut best_term = vec![0.0f64; gphi];
            let mut best_tuple: Vec<Vec<usize>> = vec![vec![0; n]; gphi];
            let mut digits = vec![0usize; n];
            loop {
                let args: Vec<&[f64]> =
                    (0..n).map(|j| xgrids[j][digits[j]].as_slice()).collect();
                let img = t.apply_coords(&args);
                for (a, phi) in phigrid.iter().enumerate() {
                    let v = dot(phi, &img).abs();
                    if v > best_term[a] {
                        best_term[a] = v;
                        best_tuple[a] = digits.clone();
                    }
                }
                let mut carry = n;
                while carry > 0 {
                    digits[carry - 1] += 1;
                    if digits[carry - 1] < xgrids[carry - 1].len() {
                        break;
                    }
                    digits[carry - 1] = 0;
                    carry -= 1;
                }
                if carry == 0 {
                    break;
                }
            }
            let pick = scan_combos(gphi, m, &best_term, &weak_of)?;
            let Some(choice) = pick else { return Ok(0.0) };
            let fams: Vec<VectorFamily> = (0..n)
                .map(|j| {
                    VectorFamily::new(
                        choice
                            .iter()
                            .map(|&a| Vector {
                                coords: xgrids[j][best_tuple[a][j]].clone(),
                                space: t.domains[j],
                            })
                            .collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let funcs = FunctionalFamily::new(
                choice
                    .iter()
                    .map(|&a| Functional { coords: phigrid[a].clone(), space: codomain })
                    .collect(),
            )?;
            let w = WitnessData::new(fams, funcs, Flavor::Coh)?;
            let a = coh_ratio(t, &w, p, CohForm::Product)?;
            let b = coh_ratio(t, &w, p, CohForm::PowerNp)?;
            Ok(a.max(b))
        }
        (AnyOperator::Multilinear(t), Flavor::MCoh) => {
            let n = t.degree();
            let nfuncs = m.pow(n as u32);
            let phi_combos = checked_pow(gphi, nfuncs as u32)
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            let vec_combos = checked_pow(resolution, (n * m) as u32)
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            let required = phi_combos
                .checked_mul(vec_combos)
                .ok_or(Error::BudgetExceeded { required: u64::MAX, budget: BRUTE_BUDGET })?;
            if required > BRUTE_BUDGET {
                return Err(Error::BudgetExceeded { required, budget: BRUTE_BUDGET });
            }
            let xgrids: Vec<Vec<Vec<f64>>> =
                t.domains.iter().map(|d| sphere_grid(*d, resolution)).collect();
            // Weak norms per functional combo, computed once.
            let mut weaks = Vec::with_capacity(phi_combos as usize);
            let mut combo = vec![0usize; nfuncs];
            loop {
                weaks.push(weak_of(&combo)?);
                if !advance(&mut combo, gphi) {
                    break;
                }
            }
            let mut best_val = 0.0f64;
            let mut best_pick: Option<(Vec<usize>, Vec<usize>)> = None;
            let mut vchoice = vec![0usize; n * m];
            loop {
                let mut imgs: Vec<Vec<f64>> = Vec::with_capacity(nfuncs);
                for k in 0..nfuncs {
                    let args: Vec<&[f64]> = (0..n)
                        .map(|j| xgrids[j][vchoice[j * m + midx(k, j, n, m)]].as_slice())
                        .collect();
                    imgs.push(t.apply_coords(&args));
                }
                let mut combo = vec![0usize; nfuncs];
                let mut ci = 0usize;
                loop {
                    let w = weaks[ci];
                    if w > 0.0 {
                        let num: f64 = combo
                            .iter()
                            .zip(&imgs)
                            .map(|(&a, img)| dot(&phigrid[a], img).abs())
                            .sum();
                        let v = num / w;
                        if v > best_val {
                            best_val = v;
                            best_pick = Some((vchoice.clone(), combo.clone()));
                        }
                    }
                    ci += 1;
                    if !advance(&mut combo, gphi) {
                        break;
                    }
                }
                if !advance(&mut vchoice, resolution) {
                    break;
                }
            }
            let Some((vchoice, combo)) = best_pick else { return Ok(0.0) };
            let fams: Vec<VectorFamily> = (0..n)
                .map(|j| {
                    VectorFamily::new(
                        (0..m)
                            .map(|i| Vector {
                                coords: xgrids[j][vchoice[j * m + i]].clone(),
                                space: t.domains[j],
                            })
                            .collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let funcs = FunctionalFamily::with_shape(
                combo
                    .iter()
                    .map(|&a| Functional { coords: phigrid[a].clone(), space: codomain })
                    .collect(),
                Some(vec![m; n]),
            )?;
            mcoh_ratio(t, &WitnessData::new(fams, funcs, Flavor::MCoh)?, p)
        }
        _ => Err(Error::SpaceMismatch(format!(
            "flavor {flavor:?} does not apply to this operator kind"
        ))),
    }
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Scan all functional index combinations, maximizing the sum of
/// precomputed per-functional best terms over the combo's weak norm.
fn scan_combos(
    gphi: usize,
    m: usize,
    best_term: &[f64],
    weak_of: &dyn Fn(&[usize]) -> Result<f64>,
) -> Result<Option<Vec<usize>>> {
    let mut combo = vec![0usize; m];
    let mut best_val = 0.0f64;
    let mut best: Option<Vec<usize>> = None;
    loop {
        let w = weak_of(&combo)?;
        if w > 0.0 {
            let num: f64 = combo.iter().map(|&a| best_term[a]).sum();
            let v = num / w;
            if v > best_val {
                best_val = v;
                best = Some(combo.clone());
            }
        }
        if !advance(&mut combo, gphi) {
            break;
        }
    }
    Ok(best)
}
