use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn adiabatic(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adiabatic"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn circuit(dir: &Path, text: &str) -> String {
    let path = dir.join("circuit.txt");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn coefficient(terms: &Value, label: &str) -> f64 {
    terms
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t[0] == label)
        .map_or(0.0, |t| t[1].as_f64().unwrap())
}

#[test]
fn compile_cnot_example() {
    let dir = TempDir::new().unwrap();
    let c = circuit(dir.path(), "CNOT 2 1\n");
    let out = adiabatic(dir.path(), &["compile", &c, "--h0", "1 ZZ; -1 ZI; 1 IZ"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("schedule.json"));
    assert_eq!(report["schema_version"], 1);
    let h = &report["schedule"]["final_hamiltonian"];
    assert_eq!(h.as_array().unwrap().len(), 3);
    for (label, c) in [("ZZ", -1.0), ("ZI", 1.0), ("IZ", 1.0)] {
        assert!((coefficient(h, label) - c).abs() < 1e-10, "{label}");
    }
    assert!((report["gap"]["min"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((report["gap"]["max"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn h0_from_file() {
    let dir = TempDir::new().unwrap();
    let c = circuit(dir.path(), "CNOT 2 1\n");
    let h0 = dir.path().join("h0.txt");
    fs::write(&h0, "# start\n1 ZZ\n-1 ZI\n1 IZ\n").unwrap();
    let out = adiabatic(dir.path(), &["compile", &c, "--h0", h0.to_str().unwrap()]);
    assert!(out.status.success());
    let h = &read_json(&dir.path().join("schedule.json"))["schedule"]["final_hamiltonian"];
    assert!((coefficient(h, "ZZ") + 1.0).abs() < 1e-10);
}

#[test]
fn empty_circuit_has_one_segment() {
    let dir = TempDir::new().unwrap();
    let c = circuit(dir.path(), "qubits 2\n");
    let out = adiabatic(dir.path(), &["compile", &c]);
    assert!(out.status.success());
    let report = read_json(&dir.path().join("schedule.json"));
    assert_eq!(report["schedule"]["segments"].as_array().unwrap().len(), 1);
    assert_eq!(report["locality_growth"], serde_json::json!([1]));
}

#[test]
fn ghz_locality_reaches_register_size() {
    let dir = TempDir::new().unwrap();
    let c = circuit(dir.path(), "H 1\nCNOT 1 2\nCNOT 2 3\nCNOT 3 4\n");
    let out = adiabatic(dir.path(), &["compile", &c]);
    assert!(out.status.success());
    let growth: Vec<u64> = read_json(&dir.path().join("schedule.json"))["locality_growth"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(growth.len(), 5);
    assert_eq!(*growth.last().unwrap(), 4);
}

#[test]
fn evolve_threshold_sets_exit_code() {
    let dir = TempDir::new().unwrap();
    let c = circuit(dir.path(), "CNOT 2 1\n");
    let slow = adiabatic(dir.path(), &["evolve", &c, "--h0", "1 ZZ; -1 ZI; 1 IZ", "--time", "200"]);
    assert_eq!(slow.status.code(), Some(0));
    let report = read_json(&dir.path().join("evolve.json"));
    assert!(report["final_fidelity"].as_f64().unwrap() >= 0.999);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "t,s,gap,fidelity");

    let fast = adiabatic(dir.path(), &["evolve", &c, "--h0", "1 ZZ; -1 ZI; 1 IZ", "--time", "0.1", "--steps", "200"]);
    assert_eq!(fast.status.code(), Some(1));
    assert_eq!(read_json(&dir.path().join("evolve.json"))["passed"], false);
}

#[test]
fn errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(adiabatic(dir.path(), &["suite", "nonexistent"]).status.code(), Some(2));
    let bad = circuit(dir.path(), "FROB 1\n");
    assert_eq!(adiabatic(dir.path(), &["compile", &bad]).status.code(), Some(2));
    let c = circuit(dir.path(), "H 1\n");
    assert_eq!(adiabatic(dir.path(), &["compile", &c, "--h0", "1 ZZ; 2 ZI"]).status.code(), Some(2));
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(adiabatic(dir.path(), &["--config", cfg.to_str().unwrap(), "history"]).status.code(), Some(2));
}

#[test]
fn suite_reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"theorem1": {"instances": 300, "ghz_instances": 10}}"#).unwrap();
    let run = |seed: &str| {
        let out = adiabatic(dir.path(), &["--config", cfg.to_str().unwrap(), "--seed", seed, "suite", "theorem1"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let file = fs::read(dir.path().join("theorem1.json")).unwrap();
        assert_eq!(file, out.stdout);
        file
    };
    let a = run("11");
    assert_eq!(a, run("11"));
    assert_ne!(a, run("12"));
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["seed"], 11);
    assert_eq!(report["passed"], true);
}

#[test]
fn history_command_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = adiabatic(dir.path(), &["history"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("history.json"));
    assert_eq!(report["suite"], "history");
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}
