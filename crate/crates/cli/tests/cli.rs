// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rydgate(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydgate"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

#[test]
fn crystal_of_three_ions() {
    let dir = TempDir::new().unwrap();
    ok(&rydgate(&["crystal", "--n", "3"], dir.path()));
    let report = read_json(&dir.path().join("crystal.json"));
    let gamma_sq: Vec<f64> = serde_json::from_value(report["gamma_sq"].clone()).unwrap();
    assert_eq!(gamma_sq.len(), 3);
    assert!((gamma_sq[2] - 12.0 / 5.0).abs() < 1e-10);
    let summary = read_json(&dir.path().join("crystal-summary.json"));
    assert_eq!(summary["config"]["command"], "crystal");
}

#[test]
fn undriven_gate_leaves_the_product_state() {
    let dir = TempDir::new().unwrap();
    ok(&rydgate(&["simulate", "--regime", "conservative", "--protocol", "b", "--omega-0", "0"], dir.path()));
    let result = &read_json(&dir.path().join("simulate-summary.json"))["result"]["outcome"];
    assert!((result["fidelity_sqr"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(result["population_error"].as_f64().unwrap().abs() < 1e-12);
    let csv = fs::read_to_string(dir.path().join("simulate-trajectory.csv")).unwrap();
    assert!(csv.starts_with('#'));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    // t, 16 populations, 4 phases, φ*, norm
    assert_eq!(header.split(',').count(), 23);
}

#[test]
fn table_one_row() {
    let dir = TempDir::new().unwrap();
    ok(&rydgate(&["reproduce", "table1", "--regime", "conservative", "--protocol", "b"], dir.path()));
    let rows = &read_json(&dir.path().join("table1-summary.json"))["result"];
    let f = rows[0]["outcome"]["fidelity_sqr"].as_f64().unwrap();
    assert!((f - 0.9998).abs() < 5e-4, "{f}");
}

/// Feeding an emitted summary back as configuration repeats the run.
#[test]
fn summary_reproduces_its_run() {
    let first = TempDir::new().unwrap();
    let args = ["optimize", "--regime", "conservative", "--protocol", "a", "--seeds", "4", "--generations", "6"];
    ok(&rydgate(&args, first.path()));
    let summary = first.path().join("optimize-summary.json");
    let second = TempDir::new().unwrap();
    ok(&rydgate(&["optimize", "--config", summary.to_str().unwrap()], second.path()));
    let a = read_json(&summary)["result"].clone();
    let b = read_json(&second.path().join("optimize-summary.json"))["result"].clone();
    for key in ["params", "fidelity", "seed", "history", "evaluations"] {
        assert_eq!(a[key], b[key], "{key}");
    }
}

#[test]
fn pulse_values_are_in_megahertz() {
    let dir = TempDir::new().unwrap();
    let args = ["pulse", "dump", "--regime", "conservative", "--protocol", "a", "--omega-0", "7.78", "--delta-0", "47.61", "--points", "3"];
    ok(&rydgate(&args, dir.path()));
    let csv = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| fs::read_to_string(p).unwrap())
        .unwrap();
    let mid: Vec<f64> = csv.lines().filter(|l| !l.starts_with('#')).nth(2).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((mid[0] - 0.5).abs() < 1e-12);
    assert!((mid[1] - 7.78).abs() < 1e-9 && (mid[2] - 47.61).abs() < 1e-9);
}

#[test]
fn exit_codes_are_categorized() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "bogus = 1\n").unwrap();
    let code = |args: &[&str]| rydgate(args, &dir.path().join("out")).status.code();
    assert_eq!(code(&["crystal", "--config", bad.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["simulate", "--tau=-1"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["crystal", "--n", "0"]), Some(3));
    let stderr = String::from_utf8(rydgate(&["crystal", "--n", "0"], dir.path()).stderr).unwrap();
    assert!(stderr.contains("E_DOMAIN") && stderr.contains("crystal"));
}
