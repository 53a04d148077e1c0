//! Exit-code and report-plumbing tests driving the installed binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cohen-norms"));
    c.env_remove("COHEN_NORMS_SEED");
    c
}

fn write(dir: &std::path::Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cohen-norms-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const ID2: &str = r#"{
  "type": "linear",
  "domains": [{ "dim": 2, "q": 2 }],
  "codomain": { "dim": 2, "q": 2 },
  "coefficients": [[1, 0], [0, 1]]
}"#;

const ID3: &str = r#"{
  "type": "linear",
  "domains": [{ "dim": 3, "q": 2 }],
  "codomain": { "dim": 3, "q": 2 },
  "coefficients": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
}"#;

const BASIS2: &str = r#"{
  "type": "vector-family",
  "space": { "dim": 2, "q": 2 },
  "members": [[1, 0], [0, 1]]
}"#;

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn passing_run_exits_zero_with_a_pass_report() {
    let dir = tempdir("pass");
    let op = write(&dir, "id2.json", ID2);
    let out = bin().args(["estimate", "dp", "--op"]).arg(&op).args(["--p", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["status"], "pass");
    let lower = report["results"][0]["bracket"]["lower"].as_f64().unwrap();
    assert!((lower - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn inverted_bracket_fails_the_report_and_exits_one() {
    // Grids of size 2 cannot certify the 3-dimensional identity, so the
    // upper bound lands below the witness value.
    let dir = tempdir("invert");
    let op = write(&dir, "id3.json", ID3);
    let out = bin()
        .args(["estimate", "dp", "--op"])
        .arg(&op)
        .args(["--p", "2", "--grid", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["status"], "fail");
}

#[test]
fn malformed_document_exits_two_with_line_diagnostic() {
    let dir = tempdir("baddoc");
    let op = write(
        &dir,
        "bad.json",
        r#"{
  "type": "linear",
  "domains": [{ "dim": 2, "q": 2 }],
  "codomain": { "dim": 2, "q": 2 },
  "coefficients": [[1, 0], [0, 1, 9]]
}"#,
    );
    let out = bin().args(["estimate", "dp", "--op"]).arg(&op).args(["--p", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5"), "{err}");
    assert!(err.contains("coefficients[1]"), "{err}");
}

#[test]
fn usage_problems_exit_two() {
    let out = bin().args(["norm", "strong", "--p", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--family"), "{err}");

    let out = bin().arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file_and_env_seed_is_the_fallback() {
    let dir = tempdir("precedence");
    let conf = write(&dir, "conf.json", r#"{ "seed": 5, "trials": 3 }"#);
    let run = |extra: &[&str], env_seed: Option<&str>| {
        let mut c = bin();
        c.args(["suite", "ideal", "--config"]).arg(&conf).args(extra);
        if let Some(s) = env_seed {
            c.env("COHEN_NORMS_SEED", s);
        }
        stdout_json(&c.output().unwrap())
    };
    assert_eq!(run(&[], None)["config"]["seed"], 5);
    assert_eq!(run(&["--seed", "11"], None)["config"]["seed"], 11);
    // The file still wins over the environment; the env fills only the gap.
    assert_eq!(run(&[], Some("77"))["config"]["seed"], 5);
    let bare = bin()
        .args(["suite", "ideal", "--trials", "2"])
        .env("COHEN_NORMS_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&bare)["config"]["seed"], 77);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempdir("badkey");
    let conf = write(&dir, "conf.json", r#"{ "sseed": 5 }"#);
    let out = bin().args(["suite", "ideal", "--config"]).arg(&conf).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sseed"));
}

#[test]
fn out_file_written_atomically_without_residue() {
    let dir = tempdir("out");
    let fam = write(&dir, "fam.json", BASIS2);
    let target = dir.join("report.json");
    let out = bin()
        .args(["norm", "strong", "--family"])
        .arg(&fam)
        .args(["--p", "1", "--out"])
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report["results"][0]["value"], 2.0);
    assert!(!dir.join("report.json.tmp").exists());
}

#[test]
fn csv_and_json_agree_on_float_rendering() {
    let dir = tempdir("fmt");
    let fam = write(&dir, "fam.json", BASIS2);
    let json = bin()
        .args(["norm", "weak", "--family"])
        .arg(&fam)
        .args(["--p", "2"])
        .output()
        .unwrap();
    let value = stdout_json(&json)["results"][0]["value"].as_f64().unwrap();
    let csv = bin()
        .args(["norm", "weak", "--family"])
        .arg(&fam)
        .args(["--p", "2", "--format", "csv"])
        .output()
        .unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.contains(&format!("weak-norm,value,{}", serde_json::to_string(&value).unwrap())));
}
