use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn polytrack(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polytrack"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn check_manifest(dir: &Path, command: &str) -> Vec<String> {
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["command"], command);
    assert_eq!(manifest["timestamp_unix"], 1700000000);
    let mut names = Vec::new();
    for a in manifest["artifacts"].as_array().unwrap() {
        let name = a["path"].as_str().unwrap();
        let bytes = std::fs::read(dir.join(name)).unwrap();
        assert_eq!(a["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)), "{name}");
        names.push(name.to_string());
    }
    let mut on_disk: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    let mut listed = names.clone();
    listed.sort();
    assert_eq!(listed, on_disk);
    names
}

#[test]
fn synth_writes_report_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["synth", "--m", "1", "--L", "5", "--n", "4"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.786151"));
    let report = json(&tmp.path().join("synthesis.json"));
    assert_eq!(report["params"]["k"], 7);
    assert_eq!(report["params"]["alpha"].as_array().unwrap().len(), 8);
    assert!((report["rho"].as_f64().unwrap() - 0.786151378).abs() < 1e-8);
    assert_eq!(check_manifest(tmp.path(), "synth"), vec!["synthesis.json"]);
}

#[test]
fn synth_sector_errors() {
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["synth", "--m", "2", "--L", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let out = polytrack(&["synth", "--m", "1", "--L", "1", "--n", "1"], tmp.path());
    assert!(out.status.success());
    let report = json(&tmp.path().join("synthesis.json"));
    assert_eq!(report["degenerate"], true);
    assert_eq!(report["rho"].as_f64(), Some(0.0));
}

#[test]
fn analyze_heavy_ball_and_unstable_random() {
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["analyze", "--algorithm", "heavy_ball", "--m", "1", "--L", "9"], tmp.path());
    assert!(out.status.success());
    let report = json(&tmp.path().join("rate.json"));
    assert!((report["sup_rate"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(report["integrators"], 1);
    let csv = std::fs::read_to_string(tmp.path().join("rate_samples.csv")).unwrap();
    assert!(csv.starts_with("lambda,spectral_radius\n"));
    check_manifest(tmp.path(), "analyze");

    // seed 3 draws an unstable algorithm: still a successful analysis
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["analyze", "--algorithm", "random", "--seed", "3", "--m", "1", "--L", "9"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not stable"));
    assert_eq!(json(&tmp.path().join("rate.json"))["stable"], false);
}

#[test]
fn simulate_optimal_tracks_cubic() {
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["simulate", "--m", "1", "--L", "5", "--n", "4", "--T", "300"], tmp.path());
    assert!(out.status.success());
    let summary = json(&tmp.path().join("summary.json"));
    assert!(summary["steady_state_error"].as_f64().unwrap() < 1e-8);
    let trace = std::fs::read_to_string(tmp.path().join("trace_optimal.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("t,err,x_0,xstar_0"));
    assert_eq!(trace.lines().count(), 302);
    check_manifest(tmp.path(), "simulate");

    let out = polytrack(&["simulate", "--m", "1", "--L", "5", "--n", "4", "--T", "5"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"m": 1, "L": 9, "n": 2, "p": 2, "T": 120,
            "a": [[1.0, -1.0], [0.1, 0.2]],
            "delta": {"diag": [1.0, 4.0]},
            "algorithm": "optimal",
            "init_offset": [0.5, 0.5]}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = polytrack(&["simulate", "--config", cfg.to_str().unwrap(), "--T", "150"], &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out_dir.join("summary.json"));
    assert_eq!(summary["T"], 150);
    let manifest = json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["config_path"], cfg.to_str().unwrap());

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{\"m\": 1,\n \"Lmax\": 9}").unwrap();
    let out = polytrack(&["synth", "--config", bad.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Lmax") && err.contains("line 2"), "{err}");
}

#[test]
fn compare_is_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["compare", "--m", "1", "--L", "5", "--n", "4", "--T", "250"];
    assert!(polytrack(&args, a.path()).status.success());
    assert!(polytrack(&args, b.path()).status.success());
    for name in check_manifest(a.path(), "compare") {
        assert_eq!(std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)).unwrap());
    }
    let csv = std::fs::read_to_string(a.path().join("compare.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("t,xstar_0,x_optimal_0,err_optimal,x_gradient_descent_0,err_gradient_descent")
    );
    let runs = json(&a.path().join("compare.json"));
    assert!(runs[0]["steady_state_error"].as_f64().unwrap() < 1e-8);
    assert!(runs[1]["steady_state_error"].as_f64().unwrap() > 1e-2);
}

#[test]
fn compare_single_algorithm_and_order_deficit() {
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["compare", "--m", "1", "--L", "5", "--n", "3", "--algorithm", "optimal"], tmp.path());
    assert!(out.status.success());
    let runs = json(&tmp.path().join("compare.json"));
    assert_eq!(runs.as_array().unwrap().len(), 1);
    // three integrators cannot follow the cubic trajectory
    assert!(runs[0]["steady_state_error"].as_f64().unwrap() > 1e-4);
}

#[test]
fn np_check_around_the_bound() {
    // bound for (1, 5, 2) is sqrt(0.381966) = 0.618
    let tmp = TempDir::new().unwrap();
    let out = polytrack(&["np-check", "--m", "1", "--L", "5", "--n", "2", "--rho", "0.6"], tmp.path());
    assert!(out.status.success());
    let below = json(&tmp.path().join("np.json"));
    assert_eq!(below["pick"]["feasible"], false);
    assert_eq!(below["pick"]["determinant_sign"], -1);
    assert!(below["feasibility_limit"].as_f64().unwrap() < 0.0);

    let out = polytrack(&["np-check", "--m", "1", "--L", "5", "--n", "2", "--rho", "0.7", "--delta", "1e-4"], tmp.path());
    assert!(out.status.success());
    let above = json(&tmp.path().join("np.json"));
    assert_eq!(above["pick"]["feasible"], true);
    assert_eq!(above["problem"]["epsilons"][1].as_f64(), Some(2e-4));
    assert!(above["feasibility_limit"].as_f64().unwrap() > 0.0);
    check_manifest(tmp.path(), "np-check");

    let out = polytrack(&["np-check", "--m", "1", "--L", "5", "--n", "2", "--rho", "1.5"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}
