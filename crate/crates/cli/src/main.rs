//! Command-line driver: parse operator/family documents, run norms,
//! estimators, check suites, and experiments, and emit machine-readable
//! reports.
//!
//! Exit codes: 0 when every result passes, 1 when any check fails or a
//! bracket inverts, 2 on usage or input errors (with a line-anchored
//! diagnostic on stderr).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cohen_norms::document::{self, FamilyDocument};
use cohen_norms::estimators::{
    brute_force_oracle, dp_upper_bound, dp_via_adjoint, lower_bound_search, pi_q_oracle,
    pietsch_upper_bound, Flavor, GridConfig, NormBracket, SearchConfig,
};
use cohen_norms::report::{Report, ResultEntry};
use cohen_norms::seqnorms::{
    cohen_seq_norm_with, strong_lp_norm, weak_lp_norm, AscentConfig, VectorFamily,
};
use cohen_norms::spaces::lq_norm;
use cohen_norms::suites::{self, SuiteSettings};
use cohen_norms::{AnyOperator, Error, Exponent, Vector};

#[derive(Parser)]
#[command(name = "cohen-norms", version, about = "Sequence norms, summing-norm brackets, and inequality check suites for operators between finite-dimensional lq spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sequence norm of a family document.
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        #[command(flatten)]
        common: Common,
    },
    /// Bracket an operator norm between a witness search and a domination
    /// bound.
    Estimate {
        #[arg(value_enum)]
        kind: EstimateKind,
        #[command(flatten)]
        common: Common,
    },
    /// Independent cross-checks: summing-norm bracket, adjoint transfer,
    /// grid exhaustion.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named inequality suite over seeded random corpora.
    Suite {
        #[arg(value_enum)]
        kind: SuiteKind,
        #[command(flatten)]
        common: Common,
    },
    /// Parameterized experiments.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Strong,
    Weak,
    Cohen,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimateKind {
    Dp,
    Coh,
    Mcoh,
    Poly,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Pi,
    AdjointDp,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteKind {
    Holder,
    Inclusion,
    Ideal,
    Coherence,
    Compatibility,
    PropertyB,
    Holomorphy,
    Dvoretzky,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Gamma,
}

#[derive(Args)]
struct Common {
    /// Operator document path.
    #[arg(long)]
    op: Option<PathBuf>,
    /// Family document path.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Exponent p (a number >= 1, or "inf"). The pi oracle reads its q here.
    #[arg(long)]
    p: Option<String>,
    /// Conjugate exponent p* where a command is parameterized by it.
    #[arg(long)]
    pstar: Option<String>,
    /// Norm flavor for the brute oracle: dp, coh, mcoh, or poly.
    #[arg(long)]
    flavor: Option<String>,
    /// Witness family size per slot.
    #[arg(long)]
    m: Option<usize>,
    /// Random restarts of the lower-bound search.
    #[arg(long)]
    restarts: Option<usize>,
    /// Iterations per restart.
    #[arg(long)]
    iters: Option<usize>,
    /// Grid sizes: one number for all grids, or phi,psi,x.
    #[arg(long)]
    grid: Option<String>,
    /// Master seed; COHEN_NORMS_SEED supplies the default.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count for suites.
    #[arg(long)]
    trials: Option<usize>,
    /// Report path; stdout when absent. Written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

/// Flag values merged with the config file, the seed env var, and defaults.
struct Effective {
    op: Option<PathBuf>,
    family: Option<PathBuf>,
    p: Option<Exponent>,
    pstar: Option<Exponent>,
    flavor: Option<String>,
    m: usize,
    restarts: usize,
    iters: usize,
    grids: GridConfig,
    grid_given: bool,
    seed: u64,
    trials: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let started = Instant::now();
    let (label, common) = match &cli.command {
        Command::Norm { kind, common } => (format!("norm {}", norm_label(*kind)), common),
        Command::Estimate { kind, common } => {
            (format!("estimate {}", estimate_label(*kind)), common)
        }
        Command::Oracle { kind, common } => (format!("oracle {}", oracle_label(*kind)), common),
        Command::Suite { kind, common } => (format!("suite {}", suite_label(*kind)), common),
        Command::Experiment { kind, common } => {
            (format!("experiment {}", experiment_label(*kind)), common)
        }
    };
    let eff = resolve(common)?;
    let mut results = match &cli.command {
        Command::Norm { kind, .. } => cmd_norm(*kind, &eff)?,
        Command::Estimate { kind, .. } => cmd_estimate(*kind, &eff)?,
        Command::Oracle { kind, .. } => cmd_oracle(*kind, &eff)?,
        Command::Suite { kind, .. } => cmd_suite(*kind, &eff)?,
        Command::Experiment { kind, .. } => cmd_experiment(*kind, &eff)?,
    };
    results.sort_by(|a, b| a.name().cmp(b.name()));
    let config = config_echo(&label, &eff);
    let report = Report::new(config, results, started.elapsed().as_millis() as u64);
    emit(&report, &eff)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn norm_label(k: NormKind) -> &'static str {
    match k {
        NormKind::Strong => "strong",
        NormKind::Weak => "weak",
        NormKind::Cohen => "cohen",
    }
}

fn estimate_label(k: EstimateKind) -> &'static str {
    match k {
        EstimateKind::Dp => "dp",
        EstimateKind::Coh => "coh",
        EstimateKind::Mcoh => "mcoh",
        EstimateKind::Poly => "poly",
    }
}

fn oracle_label(k: OracleKind) -> &'static str {
    match k {
        OracleKind::Pi => "pi",
        OracleKind::AdjointDp => "adjoint-dp",
        OracleKind::Brute => "brute",
    }
}

fn suite_label(k: SuiteKind) -> &'static str {
    match k {
        SuiteKind::Holder => "holder",
        SuiteKind::Inclusion => "inclusion",
        SuiteKind::Ideal => "ideal",
        SuiteKind::Coherence => "coherence",
        SuiteKind::Compatibility => "compatibility",
        SuiteKind::PropertyB => "property-b",
        SuiteKind::Holomorphy => "holomorphy",
        SuiteKind::Dvoretzky => "dvoretzky",
    }
}

fn experiment_label(k: ExperimentKind) -> &'static str {
    match k {
        ExperimentKind::Gamma => "gamma",
    }
}

const CONFIG_KEYS: &[&str] = &[
    "p", "pstar", "flavor", "m", "restarts", "iters", "grid", "seed", "trials", "format",
];

fn resolve(common: &Common) -> Result<Effective, String> {
    let file: serde_json::Map<String, serde_json::Value> = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| format!("{}: line {}: {e}", path.display(), e.line()))?;
            let map = match value {
                serde_json::Value::Object(m) => m,
                _ => return Err(format!("{}: config must be a JSON object", path.display())),
            };
            for key in map.keys() {
                if !CONFIG_KEYS.contains(&key.as_str()) {
                    return Err(format!("{}: unknown config key {key:?}", path.display()));
                }
            }
            map
        }
        None => serde_json::Map::new(),
    };

    let p = match (&common.p, file.get("p")) {
        (Some(s), _) => Some(parse_exponent(s)?),
        (None, Some(v)) => Some(exponent_from_value(v, "p")?),
        (None, None) => None,
    };
    let pstar = match (&common.pstar, file.get("pstar")) {
        (Some(s), _) => Some(parse_exponent(s)?),
        (None, Some(v)) => Some(exponent_from_value(v, "pstar")?),
        (None, None) => None,
    };
    let flavor = common
        .flavor
        .clone()
        .or_else(|| file.get("flavor").and_then(|v| v.as_str().map(String::from)));
    let m = merge_usize(common.m, file.get("m"), "m")?.unwrap_or(4);
    let restarts = merge_usize(common.restarts, file.get("restarts"), "restarts")?.unwrap_or(32);
    let iters = merge_usize(common.iters, file.get("iters"), "iters")?.unwrap_or(60);
    let (grids, grid_given) = match (&common.grid, file.get("grid")) {
        (Some(s), _) => (parse_grid_flag(s)?, true),
        (None, Some(v)) => (parse_grid_value(v)?, true),
        (None, None) => (GridConfig::default(), false),
    };
    let seed = match (common.seed, file.get("seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => v
            .as_u64()
            .ok_or_else(|| "config: seed must be an unsigned integer".to_string())?,
        (None, None) => match std::env::var("COHEN_NORMS_SEED") {
            Ok(s) => s
                .parse::<u64>()
                .map_err(|_| format!("COHEN_NORMS_SEED: invalid seed {s:?}"))?,
            Err(_) => 0,
        },
    };
    let trials = merge_usize(common.trials, file.get("trials"), "trials")?;
    let format = match common
        .format
        .clone()
        .or_else(|| file.get("format").and_then(|v| v.as_str().map(String::from)))
        .as_deref()
    {
        None | Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return Err(format!("--format: expected json or csv, got {other:?}")),
    };
    Ok(Effective {
        op: common.op.clone(),
        family: common.family.clone(),
        p,
        pstar,
        flavor,
        m,
        restarts,
        iters,
        grids,
        grid_given,
        seed,
        trials,
        out: common.out.clone(),
        format,
    })
}

fn merge_usize(
    flag: Option<usize>,
    file: Option<&serde_json::Value>,
    key: &str,
) -> Result<Option<usize>, String> {
    match (flag, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(v)) => v
            .as_u64()
            .map(|u| Some(u as usize))
            .ok_or_else(|| format!("config: {key} must be an unsigned integer")),
        (None, None) => Ok(None),
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    if s == "inf" {
        return Ok(Exponent::Infinity);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("invalid exponent {s:?}: expected a number >= 1 or \"inf\""))?;
    Exponent::new(v).map_err(|e| e.to_string())
}

fn exponent_from_value(v: &serde_json::Value, key: &str) -> Result<Exponent, String> {
    match v {
        serde_json::Value::String(s) if s == "inf" => Ok(Exponent::Infinity),
        serde_json::Value::Number(n) => {
            Exponent::new(n.as_f64().unwrap_or(f64::NAN)).map_err(|e| e.to_string())
        }
        _ => Err(format!("config: {key} must be a number or \"inf\"")),
    }
}

fn parse_grid_flag(s: &str) -> Result<GridConfig, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| format!("--grid: invalid size {x:?}"))
        })
        .collect::<Result<_, _>>()?;
    grid_from_parts(&parts).ok_or_else(|| "--grid: expected one size or phi,psi,x".to_string())
}

fn parse_grid_value(v: &serde_json::Value) -> Result<GridConfig, String> {
    match v {
        serde_json::Value::Number(n) => {
            let s = n
                .as_u64()
                .ok_or_else(|| "config: grid must be a positive integer".to_string())?;
            Ok(grid_from_parts(&[s as usize]).unwrap())
        }
        serde_json::Value::Array(items) => {
            let parts: Vec<usize> = items
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|u| u as usize)
                        .ok_or_else(|| "config: grid entries must be integers".to_string())
                })
                .collect::<Result<_, _>>()?;
            grid_from_parts(&parts)
                .ok_or_else(|| "config: grid must have one or three entries".to_string())
        }
        _ => Err("config: grid must be a number or an array".to_string()),
    }
}

fn grid_from_parts(parts: &[usize]) -> Option<GridConfig> {
    match parts {
        [n] => Some(GridConfig { phi_grid: *n, psi_grid: *n, x_grid: (*n / 4).max(4) }),
        [a, b, c] => Some(GridConfig { phi_grid: *a, psi_grid: *b, x_grid: *c }),
        _ => None,
    }
}

fn config_echo(command: &str, eff: &Effective) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "op": eff.op.as_ref().map(|p| p.display().to_string()),
        "family": eff.family.as_ref().map(|p| p.display().to_string()),
        "p": eff.p,
        "pstar": eff.pstar,
        "flavor": eff.flavor,
        "m": eff.m,
        "restarts": eff.restarts,
        "iters": eff.iters,
        "grid": { "phi": eff.grids.phi_grid, "psi": eff.grids.psi_grid, "x": eff.grids.x_grid },
        "seed": eff.seed,
        "trials": eff.trials,
        "format": match eff.format { Format::Json => "json", Format::Csv => "csv" },
        "out": eff.out.as_ref().map(|p| p.display().to_string()),
    })
}

fn require_p(eff: &Effective) -> Result<Exponent, String> {
    eff.p.ok_or_else(|| "--p is required for this command".to_string())
}

fn load_family(eff: &Effective) -> Result<FamilyDocument, String> {
    let path = eff
        .family
        .as_ref()
        .ok_or_else(|| "--family is required for this command".to_string())?;
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    document::parse_family_document(&path.display().to_string(), &text).map_err(|e| e.to_string())
}

fn load_operator(eff: &Effective) -> Result<(AnyOperator, Vec<ResultEntry>), String> {
    let path = eff
        .op
        .as_ref()
        .ok_or_else(|| "--op is required for this command".to_string())?;
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed = document::parse_operator_document(&path.display().to_string(), &text)
        .map_err(|e| e.to_string())?;
    let notes = parsed
        .warnings
        .into_iter()
        .map(|message| ResultEntry::Note { name: "document-note".to_string(), message })
        .collect();
    Ok((parsed.op, notes))
}

fn search_config(eff: &Effective) -> SearchConfig {
    SearchConfig { m: eff.m, restarts: eff.restarts, iters: eff.iters, seed: eff.seed }
}

fn suite_settings(eff: &Effective) -> SuiteSettings {
    SuiteSettings { search: search_config(eff), grids: eff.grids, seed: eff.seed }
}

fn cmd_norm(kind: NormKind, eff: &Effective) -> Result<Vec<ResultEntry>, String> {
    let p = require_p(eff)?;
    let fam = load_family(eff)?;
    let value = match (kind, &fam) {
        (NormKind::Strong, FamilyDocument::Vectors(f)) => strong_lp_norm(f, p),
        (NormKind::Strong, FamilyDocument::Functionals(f)) => {
            let norms: Vec<f64> = f.members().iter().map(|phi| phi.norm()).collect();
            lq_norm(&norms, p)
        }
        (NormKind::Weak, FamilyDocument::Vectors(f)) => {
            weak_lp_norm(&f.as_functionals(), p).map_err(|e| e.to_string())?
        }
        (NormKind::Weak, FamilyDocument::Functionals(f)) => {
            weak_lp_norm(f, p).map_err(|e| e.to_string())?
        }
        (NormKind::Cohen, FamilyDocument::Vectors(f)) => {
            let cfg = AscentConfig { restarts: eff.restarts, iters: eff.iters, seed: eff.seed };
            cohen_seq_norm_with(f, p, &cfg).map_err(|e| e.to_string())?.value
        }
        (NormKind::Cohen, FamilyDocument::Functionals(f)) => {
            // Functionals are vectors of the dual space.
            let dual = f.space().dual();
            let members = f
                .members()
                .iter()
                .map(|phi| Vector::new(phi.coords.clone(), dual).expect("same dimension"))
                .collect();
            let vf = VectorFamily::new(members).map_err(|e| e.to_string())?;
            let cfg = AscentConfig { restarts: eff.restarts, iters: eff.iters, seed: eff.seed };
            cohen_seq_norm_with(&vf, p, &cfg).map_err(|e| e.to_string())?.value
        }
    };
    let name = format!("{}-norm", norm_label(kind));
    Ok(vec![ResultEntry::Value { name, value }])
}

fn cmd_estimate(kind: EstimateKind, eff: &Effective) -> Result<Vec<ResultEntry>, String> {
    let p = require_p(eff)?;
    let (op, mut entries) = load_operator(eff)?;
    let flavor = match kind {
        EstimateKind::Dp => Flavor::Dp,
        EstimateKind::Coh => Flavor::Coh,
        EstimateKind::Mcoh => Flavor::MCoh,
        EstimateKind::Poly => Flavor::Poly,
    };
    match (kind, &op) {
        (EstimateKind::Dp, AnyOperator::Linear(_)) => {}
        (EstimateKind::Coh | EstimateKind::Mcoh, AnyOperator::Multilinear(_)) => {}
        (EstimateKind::Poly, AnyOperator::Polynomial(_)) => {}
        _ => {
            return Err(format!(
                "estimate {}: operator document has the wrong type",
                estimate_label(kind)
            ));
        }
    }
    let lower = lower_bound_search(&op, flavor, p, &search_config(eff)).map_err(|e| e.to_string())?;
    let upper = match &op {
        AnyOperator::Linear(t) => dp_upper_bound(t, p, &eff.grids),
        _ => pietsch_upper_bound(&op, p, &eff.grids),
    };
    let bracket = match upper {
        Ok(u) => NormBracket::merged(lower, u),
        // No domination form at this exponent: report the lower side alone.
        Err(Error::ExponentRange { .. }) => lower,
        Err(e) => return Err(e.to_string()),
    };
    entries.push(ResultEntry::Bracket {
        name: format!("{}-bracket", estimate_label(kind)),
        bracket,
    });
    Ok(entries)
}

fn cmd_oracle(kind: OracleKind, eff: &Effective) -> Result<Vec<ResultEntry>, String> {
    let (op, mut entries) = load_operator(eff)?;
    match kind {
        OracleKind::Pi => {
            let q = require_p(eff)?;
            let t = match &op {
                AnyOperator::Linear(t) => t,
                _ => return Err("oracle pi expects a linear operator document".to_string()),
            };
            let bracket = pi_q_oracle(t, q, &eff.grids).map_err(|e| e.to_string())?;
            entries.push(ResultEntry::Bracket { name: "pi-bracket".to_string(), bracket });
        }
        OracleKind::AdjointDp => {
            let p = require_p(eff)?;
            let t = match &op {
                AnyOperator::Linear(t) => t,
                _ => return Err("oracle adjoint-dp expects a linear operator document".to_string()),
            };
            let bracket = dp_via_adjoint(t, p, &eff.grids).map_err(|e| e.to_string())?;
            entries.push(ResultEntry::Bracket { name: "adjoint-dp-bracket".to_string(), bracket });
        }
        OracleKind::Brute => {
            let p = require_p(eff)?;
            let flavor = match eff.flavor.as_deref() {
                Some("dp") => Flavor::Dp,
                Some("coh") => Flavor::Coh,
                Some("mcoh") => Flavor::MCoh,
                Some("poly") => Flavor::Poly,
                Some(other) => {
                    return Err(format!(
                        "--flavor: expected dp, coh, mcoh, or poly, got {other:?}"
                    ))
                }
                None => match &op {
                    AnyOperator::Linear(_) => Flavor::Dp,
                    AnyOperator::Multilinear(_) => Flavor::Coh,
                    AnyOperator::Polynomial(_) => Flavor::Poly,
                },
            };
            let resolution = if eff.grid_given { eff.grids.phi_grid } else { 24 };
            let value = brute_force_oracle(&op, flavor, p, resolution, eff.m)
                .map_err(|e| e.to_string())?;
            entries.push(ResultEntry::Value { name: "brute-oracle".to_string(), value });
        }
    }
    Ok(entries)
}

fn cmd_suite(kind: SuiteKind, eff: &Effective) -> Result<Vec<ResultEntry>, String> {
    let seed = eff.seed;
    let trials = |default: usize| eff.trials.unwrap_or(default);
    let checks = match kind {
        SuiteKind::Holder => suites::suite_holder(trials(1000), seed),
        SuiteKind::Inclusion => suites::suite_inclusion(trials(200), seed),
        SuiteKind::Ideal => suites::suite_ideal(trials(50), seed),
        SuiteKind::Coherence => suites::suite_coherence(trials(50), seed),
        SuiteKind::Compatibility => suites::suite_compatibility(trials(50), seed),
        SuiteKind::PropertyB => suites::suite_property_b(trials(100), seed),
        SuiteKind::Holomorphy => suites::suite_holomorphy(trials(50), seed),
        SuiteKind::Dvoretzky => {
            let p = eff.p.unwrap_or(Exponent::Finite(2.0));
            let (checks, rows) =
                suites::suite_dvoretzky(p, &[1, 2, 3, 4, 5], seed).map_err(|e| e.to_string())?;
            let mut entries: Vec<ResultEntry> =
                checks.into_iter().map(ResultEntry::Check).collect();
            entries.push(ResultEntry::Trend {
                name: "dvoretzky-rogers-table".to_string(),
                rows,
            });
            return Ok(entries);
        }
    };
    Ok(checks
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(ResultEntry::Check)
        .collect())
}

fn cmd_experiment(kind: ExperimentKind, eff: &Effective) -> Result<Vec<ResultEntry>, String> {
    match kind {
        ExperimentKind::Gamma => {
            let pstar = eff.pstar.unwrap_or(Exponent::Finite(2.0));
            if pstar.is_one() || pstar.is_infinite() {
                return Err("--pstar must lie strictly between 1 and inf".to_string());
            }
            let (op, mut entries) = load_operator(eff)?;
            let t = match &op {
                AnyOperator::Linear(t) => t,
                _ => return Err("experiment gamma expects a linear operator document".to_string()),
            };
            let pairs = gamma_pairs(pstar)?;
            let (check, rows) =
                suites::gamma_collapse_experiment(t, pstar, &pairs, &suite_settings(eff))
                    .map_err(|e| e.to_string())?;
            entries.push(ResultEntry::Check(check));
            entries.push(ResultEntry::Gamma { name: "gamma-collapse-table".to_string(), rows });
            Ok(entries)
        }
    }
}

/// Default (r, q) ladder for the experiment: q = p, 1.5p, 2p with r from
/// the defining relation; the first pair is the collapsed one.
fn gamma_pairs(pstar: Exponent) -> Result<Vec<(Exponent, Exponent)>, String> {
    let p = pstar.conjugate().value();
    let mut pairs = Vec::new();
    for factor in [1.0, 1.5, 2.0] {
        let qv = factor * p;
        let rv = 1.0 / (1.0 / qv + 1.0 / pstar.value());
        let q = Exponent::new(qv).map_err(|e| e.to_string())?;
        let r = Exponent::new(rv).map_err(|e| e.to_string())?;
        pairs.push((r, q));
    }
    Ok(pairs)
}

fn emit(report: &Report, eff: &Effective) -> Result<(), String> {
    let body = match eff.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &eff.out {
        None => {
            print!("{body}");
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, &body).map_err(|e| format!("{}: {e}", tmp.display()))?;
            fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))?;
            eprintln!("wrote {} ({})", path.display(), report.status);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_parse_including_infinity() {
        assert_eq!(parse_exponent("2").unwrap(), Exponent::Finite(2.0));
        assert_eq!(parse_exponent("1").unwrap(), Exponent::One);
        assert_eq!(parse_exponent("inf").unwrap(), Exponent::Infinity);
        assert!(parse_exponent("0.5").is_err());
        assert!(parse_exponent("x").is_err());
    }

    #[test]
    fn grid_flag_accepts_one_or_three_sizes() {
        let g = parse_grid_flag("64").unwrap();
        assert_eq!((g.phi_grid, g.psi_grid, g.x_grid), (64, 64, 16));
        let g = parse_grid_flag("32, 16, 8").unwrap();
        assert_eq!((g.phi_grid, g.psi_grid, g.x_grid), (32, 16, 8));
        assert!(parse_grid_flag("1,2").is_err());
        assert!(parse_grid_flag("abc").is_err());
    }

    #[test]
    fn gamma_ladder_hits_the_classical_pairs() {
        let pairs = gamma_pairs(Exponent::Finite(2.0)).unwrap();
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs[0], (Exponent::One, Exponent::Finite(2.0)));
        assert!((pairs[1].0.value() - 1.2).abs() < 1e-12);
        assert_eq!(pairs[1].1, Exponent::Finite(3.0));
        assert!((pairs[2].0.value() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(pairs[2].1, Exponent::Finite(4.0));
    }
}
