use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn iprep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iprep")).args(args).output().unwrap()
}

fn run_config(dir: &Path, name: &str, config: &str) -> (Output, std::path::PathBuf) {
    let cfg = dir.join(format!("{name}.json"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("out_{name}"));
    let o = iprep(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (o, out)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn list_names_every_experiment() {
    let o = iprep(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "rg_gap_scaling",
        "rg_eigenvalue_flow",
        "xy_parent_check",
        "xy_liom_bound",
        "tba_sweep",
        "xxz_ed_gaps",
        "smale_audit",
        "adiabatic_fidelity",
        "entanglement_scan",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn schema_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for (name, cfg) in [
        ("malformed", "{\"experiment\": "),
        ("unknown_experiment", r#"{"experiment":"nope"}"#),
        ("unknown_field", r#"{"experiment":"tba_sweep","colour":1}"#),
        ("unknown_param", r#"{"experiment":"tba_sweep","params":{"grid":8,"x":1}}"#),
        ("missing_seed", r#"{"experiment":"xy_parent_check"}"#),
        ("bad_range", r#"{"experiment":"rg_gap_scaling","params":{"n_min":6,"n_max":4}}"#),
    ] {
        let (o, out) = run_config(dir.path(), name, cfg);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists(), "{name} created output");
        let cfg = dir.path().join(format!("{name}.json"));
        assert_eq!(iprep(&["validate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    }
}

#[test]
fn validate_accepts_a_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ok.json");
    std::fs::write(&cfg, r#"{"experiment":"xy_parent_check","seed":3}"#).unwrap();
    let o = iprep(&["validate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() == 1);
}

#[test]
fn runs_are_reproducible_and_the_manifest_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"experiment":"xy_parent_check","seed":7,"params":{"n":4,"points":6}}"#;
    let (a, out_a) = run_config(dir.path(), "a", cfg);
    let (b, out_b) = run_config(dir.path(), "b", cfg);
    assert!(a.status.success() && b.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let csv_a = std::fs::read(out_a.join("gaps.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(out_b.join("gaps.csv")).unwrap());
    let (ra, rb) = (report(&out_a), report(&out_b));
    assert_eq!(ra["input_hash"], rb["input_hash"]);
    assert_eq!(ra["passed"], Value::Bool(true));
    let files = ra["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        let bytes = std::fs::read(out_a.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(f["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn different_seeds_hash_differently() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = run_config(dir.path(), "a", r#"{"experiment":"xy_parent_check","seed":1,"params":{"n":3,"points":2}}"#);
    let (_, b) = run_config(dir.path(), "b", r#"{"experiment":"xy_parent_check","seed":2,"params":{"n":3,"points":2}}"#);
    assert_ne!(report(&a)["input_hash"], report(&b)["input_hash"]);
}

#[test]
fn size_limits_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run_config(dir.path(), "ed", r#"{"experiment":"xxz_ed_gaps","params":{"sizes":[8,12,28]}}"#);
    assert_eq!(o.status.code(), Some(3));
    let (o, _) = run_config(dir.path(), "rg", r#"{"experiment":"rg_gap_scaling","params":{"n_min":4,"n_max":20}}"#);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn small_runs_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_config(dir.path(), "ed", r#"{"experiment":"xxz_ed_gaps","params":{"sizes":[4,8,12]}}"#);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(out.join("gaps.csv").exists() && out.join("fit.json").exists());
    let (o, out) = run_config(dir.path(), "tba", r#"{"experiment":"tba_sweep","params":{"grid":256}}"#);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(std::fs::read_to_string(out.join("tba.csv")).unwrap().lines().count() > 1);
}

#[test]
fn failed_assertions_exit_1() {
    // The Gram matrices are not diagonal, so the LIOM run reports a failed assertion.
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_config(dir.path(), "liom", r#"{"experiment":"xy_liom_bound","seed":1,"params":{"n":4,"points":3}}"#);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], Value::Bool(false));
}
