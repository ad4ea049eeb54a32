use std::process::Command;

use gke_lab::cli::{dispatch, meta_path};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gke-lab"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["gke-lab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let (code, out, err) = run(&a);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

#[test]
fn table_audit_covers_six_entries() {
    let (code, v) = json(&["verify-table", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["suite"], "verify-table");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["details"]["entries"], 6);
    assert!(v["cases"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn case_two_solution_residual_is_small() {
    let (code, v) = json(&["verify-solutions", "--case", "II"]);
    assert_eq!(code, 0);
    for c in v["cases"].as_array().unwrap() {
        assert!(c["max_residual"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn injected_faults_exit_one_with_witness() {
    for args in [
        &["verify-table", "--inject-fault", "row3gen2"][..],
        &["verify-solutions", "--inject-fault", "corrupt-solution"],
        &["brackets", "--inject-fault", "corrupt-brackets"],
    ] {
        let (code, v) = json(args);
        assert_eq!(code, 1, "{args:?}");
        let failing: Vec<&Value> = v["cases"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
        assert!(!failing.is_empty());
        assert!(failing.iter().any(|c| c.get("witness").is_some()), "{args:?}");
    }
}

#[test]
fn fault_outside_its_suite_is_a_usage_error() {
    let (code, _, err) = run(&["brackets", "--inject-fault", "row3gen2"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify-table", "--no-such-flag"][..],
        &["frobnicate"],
        &["verify-table", "--tol", "-1"],
        &["verify-table", "--samples", "0"],
        &["reduce", "--case", "VI"],
        &["convergence", "--ns", "16,24,48"],
        &["verify-table", "--output", "/nonexistent-dir/sub/r.json"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn reports_are_deterministic_and_metadata_is_separate() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let (code, _, _) = run(&["verify-kernel", "--seed", "99", "--format", "json", "--output", p]);
        assert_eq!(code, 0);
        bodies.push(std::fs::read(&path).unwrap());
        let meta: Value = serde_json::from_slice(&std::fs::read(meta_path(&path)).unwrap()).unwrap();
        assert!(meta.get("elapsed_ms").is_some());
    }
    assert_eq!(bodies[0], bodies[1]);
    let (_, other) = json(&["verify-kernel", "--seed", "100"]);
    assert_ne!(serde_json::from_slice::<Value>(&bodies[0]).unwrap(), other);
}

#[test]
fn failing_report_is_still_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fail.json");
    let (code, _, _) = run(&["brackets", "--inject-fault", "corrupt-brackets", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "brackets");
}

#[test]
fn trajectory_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("traj.csv");
    let script = dir.path().join("plot.py");
    let (code, _, err) = run(&[
        "reduce",
        "--case",
        "III",
        "--format",
        "csv",
        "--output",
        data.to_str().unwrap(),
        "--plot-script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(&data).unwrap();
    assert_eq!(csv.lines().next(), Some("y,phi,dphi"));
    assert!(csv.lines().count() > 100);
    assert!(std::fs::read_to_string(&script).unwrap().contains("traj.csv"));
}

#[test]
fn field_csv_from_solve() {
    let (code, out, _) = run(&["solve", "--problem", "b", "--n", "256", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("t,y,u"));
    assert_eq!(out.lines().count(), 1 + 258);
}

#[test]
fn binary_exit_codes() {
    let ok = bin().args(["brackets"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("passed"));
    let fail = bin().args(["brackets", "--inject-fault", "corrupt-brackets"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let usage = bin().args(["--bogus"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());
}
