//! Acceptance gate: ten end-to-end criteria over the library and the binary.
//! Each test prints exactly one verdict line and enforces its runtime budget.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cohen_norms::estimators::{
    brute_force_oracle, dp_upper_bound, dp_via_adjoint, lower_bound_search, pietsch_upper_bound,
    Flavor, GridConfig, NormBracket, SearchConfig, WitnessData,
};
use cohen_norms::seqnorms::{
    cohen_seq_norm_with, strong_lp_norm, AscentConfig, FunctionalFamily, VectorFamily,
};
use cohen_norms::suites::{self, SuiteSettings};
use cohen_norms::tensor::Tensor;
use cohen_norms::{
    AnyOperator, Exponent, Functional, HomogeneousPolynomial, LinearOperator,
    MultilinearOperator, NormedSpace, Vector,
};

const MASTER_SEED: u64 = 20260823;

fn verdict(idx: usize, label: &str, ok: bool, elapsed: f64, budget: Option<f64>) {
    let within = budget.map_or(true, |b| elapsed < b);
    let word = if ok && within { "PASS" } else { "FAIL" };
    match budget {
        Some(b) => println!("criterion {idx:2} [{word}] {label} ({elapsed:.1}s of {b:.0}s)"),
        None => println!("criterion {idx:2} [{word}] {label} ({elapsed:.1}s)"),
    }
    assert!(ok, "criterion {idx} failed: {label}");
    if let Some(b) = budget {
        assert!(within, "criterion {idx} over budget: {elapsed:.1}s >= {b:.0}s");
    }
}

fn euclid(dim: usize) -> NormedSpace {
    NormedSpace::new(dim, Exponent::Finite(2.0))
}

fn coords(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn rand_vector(rng: &mut ChaCha8Rng, space: NormedSpace) -> Vector {
    Vector::new(coords(rng, space.dim), space).unwrap()
}

fn rand_functional(rng: &mut ChaCha8Rng, space: NormedSpace) -> Functional {
    Functional::new(coords(rng, space.dim), space).unwrap()
}

fn rand_family(rng: &mut ChaCha8Rng, space: NormedSpace, m: usize) -> VectorFamily {
    VectorFamily::new((0..m).map(|_| rand_vector(rng, space)).collect()).unwrap()
}

fn rand_fun_family(rng: &mut ChaCha8Rng, space: NormedSpace, m: usize) -> FunctionalFamily {
    FunctionalFamily::new((0..m).map(|_| rand_functional(rng, space)).collect()).unwrap()
}

fn rand_linear(rng: &mut ChaCha8Rng, dom: NormedSpace, cod: NormedSpace) -> LinearOperator {
    LinearOperator::new(coords(rng, dom.dim * cod.dim), dom, cod).unwrap()
}

fn rand_bilinear(
    rng: &mut ChaCha8Rng,
    d1: NormedSpace,
    d2: NormedSpace,
    cod: NormedSpace,
) -> MultilinearOperator {
    let shape = vec![cod.dim, d1.dim, d2.dim];
    let data = coords(rng, cod.dim * d1.dim * d2.dim);
    MultilinearOperator::new(Tensor::new(shape, data).unwrap(), vec![d1, d2], cod).unwrap()
}

fn rand_poly(
    rng: &mut ChaCha8Rng,
    degree: usize,
    dom: NormedSpace,
    cod: NormedSpace,
) -> HomogeneousPolynomial {
    let mut shape = vec![cod.dim];
    shape.extend(std::iter::repeat(dom.dim).take(degree));
    let len = shape.iter().product();
    let t = Tensor::new(shape, coords(rng, len)).unwrap();
    HomogeneousPolynomial::new(degree, t, dom, cod).unwrap()
}

#[test]
fn c01_mixed_power_chain_on_thousand_witnesses() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x01);
    let mut violations = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=5);
        let space = euclid(rng.gen_range(1..=4));
        let fams = (0..n).map(|_| rand_family(&mut rng, space, m)).collect();
        let funs = rand_fun_family(&mut rng, space, m);
        let w = WitnessData::new(fams, funs, Flavor::Coh).unwrap();
        let p = Exponent::new(rng.gen_range(1.0..4.0)).unwrap();
        if !suites::check_holder_chain(&w, p).passed {
            violations += 1;
        }
    }
    verdict(
        1,
        "mixed-power chain, 1000 witnesses, zero violations",
        violations == 0,
        t0.elapsed().as_secs_f64(),
        Some(5.0),
    );
}

#[test]
fn c02_sequence_norm_inclusions_and_endpoint_coincidence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x02);
    let mut ok = true;
    for i in 0..200u64 {
        let space = euclid(rng.gen_range(1..=3));
        let m = rng.gen_range(1..=4);
        let fam = rand_family(&mut rng, space, m);
        let p = Exponent::new(rng.gen_range(1.25..3.75)).unwrap();
        ok &= suites::check_inclusion_chain(&fam, p, MASTER_SEED ^ i)
            .unwrap()
            .passed;
    }
    // At the left endpoint the strong norm and the dual-ascent value agree.
    for i in 0..20u64 {
        let space = euclid(rng.gen_range(1..=3));
        let m = rng.gen_range(1..=4);
        let fam = rand_family(&mut rng, space, m);
        let strong = strong_lp_norm(&fam, Exponent::One);
        let cfg = AscentConfig { restarts: 16, iters: 40, seed: MASTER_SEED ^ i };
        let cohen = cohen_seq_norm_with(&fam, Exponent::One, &cfg).unwrap().value;
        ok &= (strong - cohen).abs() <= 1e-9 * strong.max(1.0);
    }
    verdict(
        2,
        "weak <= strong <= cohen on 200 families; equality at p=1",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(30.0),
    );
}

#[test]
fn c03_direct_bracket_agrees_with_adjoint_transfer() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x03);
    let p = Exponent::Finite(2.0);
    let grids = GridConfig::default();
    let e3 = euclid(3);
    let mut ok = true;
    for i in 0..50u64 {
        let t = rand_linear(&mut rng, e3, e3);
        let cfg = SearchConfig { m: 3, restarts: 16, iters: 40, seed: MASTER_SEED ^ i };
        let lower = lower_bound_search(&AnyOperator::Linear(t.clone()), Flavor::Dp, p, &cfg)
            .unwrap();
        let direct = NormBracket::merged(lower, dp_upper_bound(&t, p, &grids).unwrap());
        let via = dp_via_adjoint(&t, p, &grids).unwrap();
        let lo = direct.lower.max(via.lower);
        let hi = direct.upper.unwrap().min(via.upper.unwrap());
        ok &= lo <= hi * 1.05;
    }
    // The scalar identity has norm exactly 1: witness value to 1e-9, upper
    // side confirming containment.
    for pv in [1.5, 2.0] {
        let pe = Exponent::Finite(pv);
        let id = LinearOperator::identity(NormedSpace::scalar());
        let cfg = SearchConfig { m: 2, restarts: 8, iters: 30, seed: MASTER_SEED };
        let lower =
            lower_bound_search(&AnyOperator::Linear(id.clone()), Flavor::Dp, pe, &cfg).unwrap();
        let b = NormBracket::merged(lower, dp_upper_bound(&id, pe, &grids).unwrap());
        ok &= (b.lower - 1.0).abs() <= 1e-9 && b.upper.unwrap() >= 1.0 - 1e-9;
    }
    verdict(
        3,
        "direct and adjoint-transfer brackets overlap at 5%; scalar identity = 1",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(120.0),
    );
}

#[test]
fn c04_identity_norm_grows_like_sqrt_dimension() {
    let t0 = Instant::now();
    let p = Exponent::Finite(2.0);
    let (checks, rows) =
        suites::suite_dvoretzky(p, &[1, 2, 3, 4, 5], MASTER_SEED ^ 0x04).unwrap();
    let mut ok = checks.iter().all(|c| c.passed);
    for w in rows.windows(2) {
        ok &= w[0].lower < w[1].lower;
    }
    for row in &rows {
        let target = (row.dim as f64).sqrt();
        ok &= (row.lower - target).abs() <= 0.10 * target;
    }
    // Exhaustive recomputation in low dimension.
    for dim in 1..=3usize {
        let id = AnyOperator::Linear(LinearOperator::identity(euclid(dim)));
        let brute = brute_force_oracle(&id, Flavor::Dp, p, 48, dim).unwrap();
        let target = (dim as f64).sqrt();
        ok &= (brute - target).abs() <= 0.10 * target;
    }
    verdict(
        4,
        "identity lower bounds increase and match sqrt(n) to 10%, brute-checked for n<=3",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(120.0),
    );
}

#[test]
fn c05_multi_indexed_norm_below_flat_upper() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x05);
    let p = Exponent::Finite(2.0);
    let grids = GridConfig::default();
    let mut ok = true;
    for i in 0..30u64 {
        let d1 = euclid(rng.gen_range(1..=3));
        let d2 = euclid(rng.gen_range(1..=3));
        let cod = euclid(rng.gen_range(1..=2));
        let b = rand_bilinear(&mut rng, d1, d2, cod);
        let op = AnyOperator::Multilinear(b);
        let cfg = SearchConfig { m: 3, restarts: 16, iters: 40, seed: MASTER_SEED ^ i };
        let lower = lower_bound_search(&op, Flavor::MCoh, p, &cfg).unwrap().lower;
        let upper = pietsch_upper_bound(&op, p, &grids).unwrap().upper.unwrap();
        ok &= lower <= upper * 1.05;
    }
    verdict(
        5,
        "multi-indexed lower below flat-family upper on 30 bilinear maps",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(120.0),
    );
}

#[test]
fn c06_composition_inequalities_and_rank_one_value() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x06);
    let p = Exponent::Finite(2.0);
    let mut ok = true;
    for i in 0..50u64 {
        let s = SuiteSettings::with_seed(MASTER_SEED ^ (0x600 + i));
        let a = euclid(rng.gen_range(1..=3));
        let b = euclid(rng.gen_range(1..=3));
        let c = euclid(rng.gen_range(1..=3));
        let d = euclid(rng.gen_range(1..=3));
        let a1 = rand_linear(&mut rng, a, b);
        let t = rand_linear(&mut rng, b, c);
        let a2 = rand_linear(&mut rng, c, d);
        ok &= suites::check_ideal_linear(&a1, &t, &a2, p, 8, &s).unwrap().passed;
    }
    for i in 0..50u64 {
        let s = SuiteSettings::with_seed(MASTER_SEED ^ (0x700 + i));
        let d1 = euclid(rng.gen_range(1..=2));
        let d2 = euclid(rng.gen_range(1..=2));
        let mid = euclid(rng.gen_range(1..=2));
        let cod = euclid(rng.gen_range(1..=2));
        let t = rand_bilinear(&mut rng, d1, d2, mid);
        let post = rand_linear(&mut rng, mid, cod);
        let pre = vec![rand_linear(&mut rng, d1, d1), rand_linear(&mut rng, d2, d2)];
        ok &= suites::check_ideal_multilinear(&post, &t, &pre, p, 8, &s)
            .unwrap()
            .passed;
    }
    // Rank-one maps have norm exactly ||phi|| * ||y||.
    let grids = GridConfig::default();
    for i in 0..10u64 {
        let dom = euclid(rng.gen_range(1..=3));
        let cod = euclid(rng.gen_range(1..=3));
        let phi = rand_functional(&mut rng, dom);
        let y = rand_vector(&mut rng, cod);
        let t = LinearOperator::rank_one(&phi, &y);
        let cfg = SearchConfig { m: 3, restarts: 16, iters: 40, seed: MASTER_SEED ^ i };
        let lower = lower_bound_search(&AnyOperator::Linear(t.clone()), Flavor::Dp, p, &cfg)
            .unwrap();
        let bracket = NormBracket::merged(lower, dp_upper_bound(&t, p, &grids).unwrap());
        let value = phi.norm() * y.norm();
        ok &= bracket.lower <= value * 1.05 && value <= bracket.upper.unwrap() * 1.05;
    }
    verdict(
        6,
        "composition inequalities, 50 linear + 50 multilinear; rank-one value in bracket",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(120.0),
    );
}

#[test]
fn c07_coherence_and_compatibility_at_constant_one() {
    let t0 = Instant::now();
    let coh = suites::suite_coherence(50, MASTER_SEED ^ 0x07).unwrap();
    let cp = suites::suite_compatibility(50, MASTER_SEED ^ 0x07).unwrap();
    let mut ok = true;
    for r in coh.iter().chain(cp.iter()) {
        ok &= r.passed;
    }
    // The two ratio corpora hold to identity precision, not just 5%.
    for r in coh.iter().chain(cp.iter()) {
        if r.name.contains("ratio") {
            ok &= r.margin >= -1e-10;
        }
    }
    verdict(
        7,
        "degree-shift rules 1-4 both flavors, 50 each; rules 5 to 1e-10",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(300.0),
    );
}

#[test]
fn c08_scalar_slot_restriction_and_differential_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x08);
    let p = Exponent::Finite(2.0);
    let mut ok = true;
    for i in 0..100u64 {
        let s = SuiteSettings::with_seed(MASTER_SEED ^ (0x800 + i));
        let dom = euclid(rng.gen_range(1..=3));
        let cod = euclid(rng.gen_range(1..=2));
        let a = rand_bilinear(&mut rng, dom, NormedSpace::scalar(), cod);
        ok &= suites::check_property_b(&a, p, 2, &s).unwrap().passed;
    }
    for i in 0..50u64 {
        let s = SuiteSettings::with_seed(MASTER_SEED ^ (0x900 + i));
        let dom = euclid(rng.gen_range(1..=2));
        let cod = euclid(rng.gen_range(1..=2));
        let degree = rng.gen_range(1..=3);
        let pol = rand_poly(&mut rng, degree, dom, cod);
        let a = rand_vector(&mut rng, dom);
        let k = rng.gen_range(0..=degree);
        ok &= suites::check_holomorphy_bound(&pol, &a, k, p, &s).unwrap().passed;
    }
    verdict(
        8,
        "scalar-slot padding identity on 100 maps; differential bound on 50 triples",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(120.0),
    );
}

#[test]
fn c09_summing_interpolation_collapses_to_dp() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 0x09);
    let pstar = Exponent::Finite(2.0);
    let pairs = [
        (Exponent::One, Exponent::Finite(2.0)),
        (Exponent::Finite(6.0 / 5.0), Exponent::Finite(3.0)),
        (Exponent::Finite(4.0 / 3.0), Exponent::Finite(4.0)),
    ];
    let e3 = euclid(3);
    let mut ok = true;
    for i in 0..10u64 {
        let s = SuiteSettings::with_seed(MASTER_SEED ^ (0xA00 + i));
        let t = rand_linear(&mut rng, e3, e3);
        let (check, rows) = suites::gamma_collapse_experiment(&t, pstar, &pairs, &s).unwrap();
        ok &= check.passed;
        ok &= rows.iter().all(|r| r.constant.is_finite());
    }
    verdict(
        9,
        "interpolated constants finite; collapsed pair matches the d_2 bracket at 5%",
        ok,
        t0.elapsed().as_secs_f64(),
        Some(60.0),
    );
}

fn normalize_wall_ms(report: &str) -> String {
    let key = "\"wall_ms\": ";
    match report.find(key) {
        None => report.to_string(),
        Some(at) => {
            let digits_from = at + key.len();
            let digits_to = report[digits_from..]
                .find(|c: char| !c.is_ascii_digit())
                .map_or(report.len(), |d| digits_from + d);
            format!("{}0{}", &report[..digits_from], &report[digits_to..])
        }
    }
}

#[test]
fn c10_reports_are_byte_identical_across_runs() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_cohen-norms");
    let kinds = [
        "holder",
        "inclusion",
        "ideal",
        "coherence",
        "compatibility",
        "property-b",
        "holomorphy",
        "dvoretzky",
    ];
    let mut ok = true;
    for kind in kinds {
        // The binary computes sequentially; thread-count env vars must not
        // leak into the report either way.
        let run = |threads: &str| {
            let out = Command::new(bin)
                .args(["suite", kind, "--seed", "99"])
                .env_remove("COHEN_NORMS_SEED")
                .env("RAYON_NUM_THREADS", threads)
                .env("OMP_NUM_THREADS", threads)
                .output()
                .unwrap();
            (out.status.success(), String::from_utf8(out.stdout).unwrap())
        };
        let (pass1, rep1) = run("1");
        let (pass2, rep2) = run("8");
        ok &= pass1 && pass2;
        ok &= normalize_wall_ms(&rep1) == normalize_wall_ms(&rep2);
    }
    verdict(
        10,
        "full suite runs twice per kind, byte-identical after fixing wall_ms",
        ok,
        t0.elapsed().as_secs_f64(),
        None,
    );
}
