//! Deterministic low-discrepancy point sets on l_q unit spheres.
//!
//! A grid starts with the signed coordinate vertices and continues with a
//! Kronecker (generalized golden ratio) sequence in the unit cube, mapped
//! coordinate-wise through the inverse CDF of the generalized Gaussian with
//! density proportional to exp(-|t|^q) and then normalized to the sphere.
//! For q = 2 that distribution makes normalized points near-uniform on the
//! Euclidean sphere; for q = 1 it is the exponential construction with the
//! same property on the cross-polytope.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::spaces::{lq_norm, Exponent, NormedSpace};

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, n = 9).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series for x < a + 1, Lentz continued fraction for the tail otherwise.
pub(crate) fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lg = ln_gamma(a);
    if x < a + 1.0 {
        // P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n)).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum.ln() + a * x.ln() - x - lg).exp()
    } else {
        // Q(a,x) via continued fraction; P = 1 - Q.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (a * x.ln() - x - lg).exp() * h;
        (1.0 - q).clamp(0.0, 1.0)
    }
}

/// Inverse of P(a, .) by bracket expansion + bisection; monotone and
/// deterministic. Returns x with P(a, x) ~ v for v in [0, 1).
pub(crate) fn inv_gamma_p(a: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let v = v.min(1.0 - 1e-12);
    let mut hi = a.max(1.0);
    while gamma_p(a, hi) < v {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma_p(a, mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Magnitude sample of the generalized Gaussian exp(-t^q) via inverse CDF:
/// the CDF of |T| is P(1/q, t^q).
fn generalized_gaussian_magnitude(q: f64, v: f64) -> f64 {
    inv_gamma_p(1.0 / q, v).powf(1.0 / q)
}

/// Root of x^(d+1) = x + 1, the base of the d-dimensional Kronecker
/// sequence.
fn harmonious(d: usize) -> f64 {
    let mut x = 1.5f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

struct GridState {
    points: Vec<Vec<f64>>,
    next_k: u64,
}

fn q_key(q: Exponent) -> u64 {
    match q {
        Exponent::One => 1,
        Exponent::Infinity => u64::MAX,
        Exponent::Finite(p) => p.to_bits(),
    }
}

static GRID_CACHE: OnceLock<Mutex<HashMap<(usize, u64), GridState>>> = OnceLock::new();

fn extend_grid(space: NormedSpace, st: &mut GridState, size: usize) {
    let d = space.dim;
    while st.points.len() < size && st.points.len() < 2 * d {
        let i = st.points.len() / 2;
        let sgn = if st.points.len() % 2 == 0 { 1.0 } else { -1.0 };
        let mut v = vec![0.0; d];
        v[i] = sgn;
        st.points.push(v);
    }
    if st.points.len() >= size {
        return;
    }
    let phi = harmonious(d);
    let alphas: Vec<f64> = (0..d).map(|j| (1.0 / phi.powi(j as i32 + 1)).fract()).collect();
    while st.points.len() < size {
        let k = st.next_k;
        st.next_k += 1;
        let mut coords = Vec::with_capacity(d);
        for alpha in &alphas {
            let u = (0.5 + alpha * k as f64).fract();
            let t = 2.0 * u - 1.0;
            let sgn = if t < 0.0 { -1.0 } else { 1.0 };
            let mag = t.abs().min(1.0 - 1e-12);
            let c = match space.q {
                Exponent::Infinity => mag,
                Exponent::One => generalized_gaussian_magnitude(1.0, mag),
                Exponent::Finite(q) => generalized_gaussian_magnitude(q, mag),
            };
            coords.push(sgn * c);
        }
        let norm = lq_norm(&coords, space.q);
        if norm < 1e-12 {
            continue;
        }
        for c in coords.iter_mut() {
            *c /= norm;
        }
        st.points.push(coords);
    }
}

/// Deterministic point set of `size` unit vectors on the l_q sphere of
/// `space`. The first 2*dim points are the signed coordinate vectors.
///
/// Grids are pure functions of (dim, q, size) with the prefix property, so
/// results are cached per (dim, q) and grown on demand; repeated calls are
/// cheap.
pub fn sphere_grid(space: NormedSpace, size: usize) -> Vec<Vec<f64>> {
    let cache = GRID_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    let st = map
        .entry((space.dim, q_key(space.q)))
        .or_insert_with(|| GridState { points: Vec::new(), next_k: 1 });
    extend_grid(space, st, size);
    st.points[..size].to_vec()
}
