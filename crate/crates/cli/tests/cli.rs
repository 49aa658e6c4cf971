use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn demo(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("demos").join(name)
}

fn ghlab(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghlab"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("run ghlab")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report exists")).expect("valid json")
}

#[test]
fn verdict_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghlab(&["run"], &demo("verdict_imaginary.json"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("verdict.json"));
    assert_eq!(report["command"], "verdict");
    assert_eq!(report["verified"], true);
    assert_eq!(report["result"]["result"], "GH");
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn unknown_field_is_a_usage_error_with_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"command": "verdict", "spectrum": {"kind": "identity"},
            "operator": {"kind": "constant", "omega": 1}, "truncation": {"J": 10, "bogus": 1}}"#,
    )
    .unwrap();
    let out = ghlab(&["run"], &cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/truncation"), "{stderr}");
}

#[test]
fn unknown_generator_points_at_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghlab(
        &["solve", "--set", "data.generator=nope"],
        &demo("solve_variable.json"),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = read_json(&dir.path().join("error.json"));
    assert_eq!(err["error"]["pointer"], "/data/generator");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn overrides_change_the_hash_and_the_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(ghlab(&["run"], &demo("verdict_imaginary.json"), &a).status.success());
    assert!(ghlab(&["run", "--set", "truncation.J=20"], &demo("verdict_imaginary.json"), &b)
        .status
        .success());
    let (ra, rb) = (read_json(&a.join("verdict.json")), read_json(&b.join("verdict.json")));
    assert_ne!(ra["config_hash"], rb["config_hash"]);
    assert_eq!(rb["truncation"]["J"], 20);
}

#[test]
fn resonant_operator_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("resonant.json");
    std::fs::write(
        &cfg,
        r#"{"command": "solve", "spectrum": {"kind": "identity"},
            "operator": {"kind": "constant", "omega": 0.5},
            "data": {"generator": "fixed", "params": {"f": {"trig": [[-1, 1]]}}},
            "truncation": {"J": 4}}"#,
    )
    .unwrap();
    let out = ghlab(&["run"], &cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn truncation_beyond_spectrum_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghlab(
        &["run", "--set", "spectrum.len=5", "--set", "truncation.J=10"],
        &demo("verdict_imaginary.json"),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
