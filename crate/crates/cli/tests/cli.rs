use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qecbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qecbound")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn hmax_prints_json() {
    let out = qecbound(&["hmax", "--noise", "dephasing", "--param", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() + 0.478054874069927).abs() < 1e-7);
    assert!(v["iterations"].is_u64());
    assert_eq!(v["converged"], Value::Bool(true));
}

#[test]
fn region_layout_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("region.csv");
    let out = qecbound(&["region", "--noise", "dephasing", "--param", "0.01", "--N", "20", "--grid", "41x41", "-o", path(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,q,h,delta1,delta2,delta_bound,inside_asymptotic"));
    assert_eq!(lines.count(), 1681);
    let m = manifest(dir.path());
    assert_eq!(m["seed"], 0);
    assert_eq!(m["params"]["N"], 20);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["wall_clock_seconds"].is_f64());
}

#[test]
fn chaos_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = qecbound(&["chaos", "--p", "1", "--n", "100", "--samples", "50", "--seed", "7", "-o", path(&csv)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 101 + 1);
    assert_eq!(manifest(dir.path())["seed"], 7);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("base.csv");
    let cfg = dir.path().join("run.json");
    let body = serde_json::json!({
        "command": "baseline", "noise": "dephasing", "param": 0.5,
        "c": 0, "q": 0.5, "N": 4, "bruteforce": true, "o": path(&csv),
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    let out = qecbound(&["--config", path(&cfg), "baseline", "--param", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.1);
    let (closed, brute): (f64, f64) = (row[6].parse().unwrap(), row[7].parse().unwrap());
    assert!((closed - brute).abs() < 1e-12);
    let m = manifest(dir.path());
    assert_eq!(m["params"]["param"], 0.1);
    assert_eq!(m["seed"], 0);

    // the command itself can come from the config
    let out = qecbound(&["--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["region", "--noise", "dephasing", "--param", "0.1", "--N", "4"],
        &["hmax", "--noise", "bitflip", "--param", "0.1"],
        &["hmax", "--noise", "dephasing", "--param", "1.5"],
        &["region", "--noise", "dephasing", "--param", "0.1", "--N", "4", "--grid", "41", "-o", "x.csv"],
        &["verify", "--only", "nothing"],
    ] {
        let out = qecbound(args);
        assert_eq!(out.status.code(), Some(2), "{:?}", args);
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{:?}", args);
    }
}

#[test]
fn verify_only_baseline() {
    let out = qecbound(&["verify", "--only", "baseline"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let checks: Vec<&str> = text.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|l| l.starts_with("[PASS]") && l.contains("(baseline,")));
}

#[test]
fn perturbed_oracle_fails_verify() {
    let out = qecbound(&["verify", "--only", "entropy", "--perturb-closed-form"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("[FAIL]") && l.contains("dephasing closed form")));
}
