//! The `wapprox` binary: exit codes and report files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn wapprox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wapprox")).args(args).output().unwrap()
}

fn write_config(dir: &Path, cfg: &Value) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn monomial_config(suites: &[&str]) -> Value {
    json!({
        "weight": { "kind": "generalized_jacobi", "factors": [] },
        "zset": [-1, 1],
        "function": { "name": "monomial", "params": { "k": 2 } },
        "r": 2,
        "n_ladder": [4, 8],
        "grids": { "h_grid": 16, "x_grid": 256, "approx_grid": 16 },
        "suites": suites,
        "t_ladder": [0.25, 0.125]
    })
}

#[test]
fn empty_suites_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &monomial_config(&[]));
    let out = wapprox(&["verify", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_field_and_suite_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = monomial_config(&["jackson"]);
    bad["bogus"] = json!(1);
    let cfg = write_config(dir.path(), &bad);
    assert_eq!(wapprox(&["verify", &cfg]).status.code(), Some(2));

    let cfg = write_config(dir.path(), &monomial_config(&["jackson"]));
    let out = wapprox(&["verify", &cfg, "--suite", "nonsense", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = wapprox(&["approx", &cfg, "--grid-scale", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn polynomial_modulus_properties_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &monomial_config(&["modulus_properties"]));
    let outdir = dir.path().join("out");
    let out = wapprox(&["verify", &cfg, "--out", outdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = std::fs::read_to_string(outdir.join("summary.csv")).unwrap();
    assert!(summary.lines().count() > 5);
    assert!(outdir.join("saturation_main_part.csv").exists());
    assert!(outdir.join("saturation_main_part.json").exists());
}

#[test]
fn other_subcommands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = monomial_config(&["jackson"]);
    cfg["function"] = json!({ "name": "power_abs", "params": { "alpha": 1 } });
    cfg["zset"] = json!([-1, 0, 1]);
    let cfg = write_config(dir.path(), &cfg);
    let o = dir.path().to_str().unwrap();
    for cmd in ["approx", "modulus", "check-weight"] {
        let out = wapprox(&[cmd, &cfg, "--out", o]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let approx = std::fs::read_to_string(dir.path().join("approx.csv")).unwrap();
    assert!(approx.starts_with("n,error"));
    assert!(dir.path().join("moduli.csv").exists());
    assert!(dir.path().join("weight_class.json").exists());
}

#[test]
fn failing_suite_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // jackson's bounded-ratio test fails for an entire function: E_n decays
    // much faster than the modulus
    let mut cfg = monomial_config(&["jackson"]);
    cfg["function"] = json!({ "name": "exp", "params": {} });
    cfg["n_ladder"] = json!([4, 8, 16]);
    cfg["grids"]["x_grid"] = json!(512);
    let cfg = write_config(dir.path(), &cfg);
    let out = wapprox(&["verify", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}
