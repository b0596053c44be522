use std::path::PathBuf;
use std::process::{Command, Output};

fn gvlp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvlp")).args(args).output().expect("spawn gvlp")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gvlp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, json: &str) -> String {
    let path = scratch(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

const LIGHT: &str = r#"{"hermite_nodes": 40, "laguerre_nodes": 32, "suite": [{"kind": "hermite", "nu": [1]}, {"kind": "hermite", "nu": [3]}]}"#;

#[test]
fn covering_passes() {
    let out = gvlp(&["covering"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "gvlp-report/1");
}

#[test]
fn semigroup_csv_header() {
    let cfg = write_config("light.json", LIGHT);
    let out = gvlp(&["semigroup", "--config", &cfg, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("function_id,operator,param,ratio,verdict"));
    assert!(text.lines().count() > 2 * 13);
}

#[test]
fn same_seed_gives_identical_files() {
    let cfg = write_config("seeded.json", LIGHT);
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for path in [&a, &b] {
        let out = gvlp(&["semigroup", "--config", &cfg, "--seed", "7", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn oscillating_exponent_is_flagged() {
    let cfg = write_config(
        "osc.json",
        r#"{"exponent": {"name": "oscillating", "p0": 2.5, "a": 0.5}, "hermite_nodes": 40, "laguerre_nodes": 32, "suite": [{"kind": "hermite", "nu": [2]}]}"#,
    );
    let out = gvlp(&["semigroup", "--config", &cfg]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypotheses unverified"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["hypotheses"]["flag"], "hypotheses unverified");
}

#[test]
fn check_exponent_fails_for_oscillating_exponent() {
    let cfg = write_config("osc2.json", r#"{"exponent": {"name": "oscillating", "p0": 2.5, "a": 0.5}}"#);
    let out = gvlp(&["check-exponent", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_configs_exit_with_two() {
    assert_eq!(gvlp(&["norms", "--config", "/nonexistent/gvlp.json"]).status.code(), Some(2));
    let unknown = write_config("unknown.json", r#"{"no_such_field": 1}"#);
    let out = gvlp(&["norms", "--config", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
