use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_opcommute"));
    c.env_remove("OPCOMMUTE_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("opcommute-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn classical_witness_passes() {
    let dir = scratch("classical");
    let path = dir.join("w.json");
    let o = run(&["anderson", "classical", "--levels", "20", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["tool"], "opcommute");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["pass"], true);
    let w: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(w["D_blocks"].is_array());

    let o = run(&["obstruct", "diag-omega", "--input", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn seeded_reports_are_deterministic() {
    let args = ["anderson", "t7", "--levels", "12", "--seed", "42", "--rule", "uniform"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 42);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["density", "--form", "nope", "--N", "10"]).status.code(), Some(2));
    assert_eq!(run(&["anderson", "t7", "--L", "1.2"]).status.code(), Some(2));
    assert_eq!(run(&["seq", "intersect", "--blocks", "11"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn failing_checks_exit_one() {
    let o = run(&["seq", "ideal", "--len", "1500"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn tolerance_override() {
    let o = bin().env("OPCOMMUTE_TOL", "residual=1e-30").args(["anderson", "classical", "--levels", "20"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["tolerances"]["residual"], 1e-30);

    let o = bin().env("OPCOMMUTE_TOL", "bogus=1").args(["anderson", "classical"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn density_csv_and_json() {
    let o = run(&["density", "--form", "staircase3n", "--N", "9,3000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,L_N,D_N"));
    assert!(lines.next().unwrap().starts_with("9,63,"));

    let o = run(&["density", "--form", "hessenberg", "--N", "1000", "--json"]);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "density");
}

#[test]
fn tridiag_random_writes_outputs() {
    let dir = scratch("tridiag");
    let o = run(&["tridiag", "--random", "60", "--seed", "3", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 3);
    assert_eq!(report["pass"], true);
}

#[test]
fn growth_and_intersection() {
    let o = run(&["obstruct", "growth", "--sizes", "2x3n", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["seq", "intersect", "--blocks", "6"]);
    assert_eq!(o.status.code(), Some(0));
}
