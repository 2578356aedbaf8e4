use std::process::Command;

use serde_json::Value;

fn xhermite(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_xhermite")).args(args).output().expect("binary runs")
}

#[test]
fn construct_accepts_odd_partition() {
    let dir = tempfile::tempdir().unwrap();
    let out = xhermite(&["construct", "--partition", "1", "--n", "3,5", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("construct_n003.json")).unwrap()).unwrap();
    assert_eq!(json["ode_exact"], Value::Bool(true));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["claims"].as_array().unwrap().iter().any(|c| c["id"] == "exceptional_ode" && c["verdict"] == "PASS"));
}

#[test]
fn config_file_runs_and_echoes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("bundle");
    let cfg = dir.path().join("c.json");
    let body = serde_json::json!({
        "partition": [1, 1],
        "n_values": [12, 10],
        "scenarios": ["zeros"],
        "seed": 3,
        "output_dir": out_dir,
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    let out = xhermite(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let echo: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(echo["n_values"], serde_json::json!([10, 12]));
    assert!(out_dir.join("zeros_n010.csv").exists());
    assert!(out_dir.join("construct_n012.json").exists());
}

#[test]
fn rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(!xhermite(&["zeros", "--partition", "1", "--n", "4", "--out", d]).status.success());
    assert!(!xhermite(&["construct", "--partition", "1,2", "--n", "4", "--out", d]).status.success());
    assert!(!xhermite(&["construct", "--partition", "1,1", "--n", "4", "--precision", "32", "--out", d]).status.success());
}
