//! Machine-readable run reports.
//!
//! A report is {"version", "config", "results", "wall_ms", "status"}.
//! Results are heterogeneous: norm values, brackets, check rows, tables,
//! and notes. Numbers render as the shortest decimal recovering the same
//! binary value in both JSON and CSV, so re-running a config reproduces
//! identical numeric content; wall_ms is the one field that varies between
//! runs.

use serde::Serialize;

use crate::estimators::NormBracket;
use crate::suites::{CheckResult, GammaRow, TrendRow, REL_SLACK};

/// One row of a report.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ResultEntry {
    Check(CheckResult),
    Bracket { name: String, bracket: NormBracket },
    Value { name: String, value: f64 },
    Trend { name: String, rows: Vec<TrendRow> },
    Gamma { name: String, rows: Vec<GammaRow> },
    Note { name: String, message: String },
}

impl ResultEntry {
    pub fn name(&self) -> &str {
        match self {
            ResultEntry::Check(c) => &c.name,
            ResultEntry::Bracket { name, .. }
            | ResultEntry::Value { name, .. }
            | ResultEntry::Trend { name, .. }
            | ResultEntry::Gamma { name, .. }
            | ResultEntry::Note { name, .. } => name,
        }
    }

    /// A check that did not pass, or a bracket whose lower estimate exceeds
    /// its upper bound beyond the shared slack, fails the run.
    pub fn failed(&self) -> bool {
        match self {
            ResultEntry::Check(c) => !c.passed,
            ResultEntry::Bracket { bracket, .. } => bracket.is_inverted(REL_SLACK),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub config: serde_json::Value,
    pub results: Vec<ResultEntry>,
    pub wall_ms: u64,
    pub status: String,
}

impl Report {
    pub fn new(config: serde_json::Value, results: Vec<ResultEntry>, wall_ms: u64) -> Self {
        let status =
            if results.iter().any(ResultEntry::failed) { "fail" } else { "pass" };
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            results,
            wall_ms,
            status: status.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Flat key/value table; numbers use the same shortest round-trip
    /// rendering as the JSON output.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,key,value\n");
        let mut push = |name: &str, key: &str, value: String| {
            out.push_str(name);
            out.push(',');
            out.push_str(key);
            out.push(',');
            out.push_str(&value);
            out.push('\n');
        };
        push("report", "version", self.version.clone());
        push("report", "status", self.status.clone());
        push("report", "wall_ms", self.wall_ms.to_string());
        for entry in &self.results {
            let name = entry.name();
            match entry {
                ResultEntry::Check(c) => {
                    push(name, "passed", c.passed.to_string());
                    push(name, "margin", fmt_f64(c.margin));
                    push(name, "digest", c.digest.clone());
                    push(name, "seed", c.seed.to_string());
                }
                ResultEntry::Bracket { bracket, .. } => {
                    push(name, "lower", fmt_f64(bracket.lower));
                    if let Some(u) = bracket.upper {
                        push(name, "upper", fmt_f64(u));
                    }
                    if let Some(g) = bracket.diagnostics.gap {
                        push(name, "gap", fmt_f64(g));
                    }
                    push(name, "restarts", bracket.diagnostics.restarts.to_string());
                    push(name, "iters", bracket.diagnostics.iters.to_string());
                    push(name, "simplex_steps", bracket.diagnostics.simplex_steps.to_string());
                }
                ResultEntry::Value { value, .. } => {
                    push(name, "value", fmt_f64(*value));
                }
                ResultEntry::Trend { rows, .. } => {
                    for row in rows {
                        push(name, &format!("dim-{}-lower", row.dim), fmt_f64(row.lower));
                        push(name, &format!("dim-{}-upper", row.dim), fmt_f64(row.upper));
                    }
                }
                ResultEntry::Gamma { rows, .. } => {
                    for row in rows {
                        push(
                            name,
                            &format!("r-{}-q-{}", fmt_f64(row.r), fmt_f64(row.q)),
                            fmt_f64(row.constant),
                        );
                    }
                }
                ResultEntry::Note { message, .. } => {
                    push(name, "note", format!("\"{}\"", message.replace('"', "\"\"")));
                }
            }
        }
        out
    }
}

/// Shortest decimal that parses back to the same f64; identical to the
/// JSON rendering of the number.
pub fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Diagnostics;

    fn check(name: &str, passed: bool) -> ResultEntry {
        ResultEntry::Check(CheckResult {
            name: name.into(),
            passed,
            margin: if passed { 0.25 } else { -0.5 },
            digest: "00".into(),
            seed: 3,
        })
    }

    #[test]
    fn status_reflects_failures() {
        let ok = Report::new(serde_json::json!({}), vec![check("a", true)], 1);
        assert_eq!(ok.status, "pass");
        assert!(ok.passed());
        let bad = Report::new(serde_json::json!({}), vec![check("a", true), check("b", false)], 1);
        assert_eq!(bad.status, "fail");
    }

    #[test]
    fn inverted_bracket_fails_the_run() {
        let inverted = NormBracket {
            lower: 2.0,
            upper: Some(1.0),
            witness: None,
            measure: None,
            diagnostics: Diagnostics::default(),
        };
        let report = Report::new(
            serde_json::json!({}),
            vec![ResultEntry::Bracket { name: "x".into(), bracket: inverted }],
            1,
        );
        assert_eq!(report.status, "fail");
    }

    #[test]
    fn csv_and_json_share_float_rendering() {
        let tricky = 0.1 + 0.2;
        let report = Report::new(
            serde_json::json!({}),
            vec![ResultEntry::Value { name: "v".into(), value: tricky }],
            1,
        );
        let json = report.to_json();
        let csv = report.to_csv();
        let rendered = fmt_f64(tricky);
        assert!(json.contains(&rendered));
        assert!(csv.contains(&format!("v,value,{rendered}")));
        assert_eq!(rendered.parse::<f64>().unwrap(), tricky);
    }

    #[test]
    fn serialization_is_stable() {
        let report = Report::new(serde_json::json!({"seed": 1}), vec![check("a", true)], 7);
        assert_eq!(report.to_json(), report.to_json());
        assert_eq!(report.to_csv(), report.to_csv());
    }
}
