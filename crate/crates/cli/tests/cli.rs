use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tentflex::{PiecewiseLinear, PlUnimodalMap};

fn tentflex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tentflex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn entropy_of_full_tent() {
    let v = json_stdout(&tentflex(&["entropy", "--s", "2", "--t", "2"]));
    let ln2 = std::f64::consts::LN_2;
    assert!((v["h_top"].as_f64().unwrap() - ln2).abs() < 1e-9);
    assert!((v["h_mu"].as_f64().unwrap() - ln2).abs() < 1e-9);
}

#[test]
fn density_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rho.csv");
    let out = tentflex(&[
        "density",
        "--s",
        "2.3",
        "--t",
        "1.7",
        "--csv",
        path_str(&csv),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_left,x_right,rho"));
    let mut mass = 0.0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        mass += (f[1] - f[0]) * f[2];
    }
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn solve_on_the_full_family() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("solution.json");
    let out = tentflex(&[
        "solve",
        "--a",
        "0.693147",
        "--b",
        "0.2",
        "--json",
        path_str(&file),
    ]);
    let v = json_stdout(&out);
    assert!((v["h_mu"].as_f64().unwrap() - 0.2).abs() <= 1e-6);
    let (s, t) = (
        v["map"]["s"].as_f64().unwrap(),
        v["map"]["t"].as_f64().unwrap(),
    );
    assert!((1.0 / s + 1.0 / t - 1.0).abs() < 1e-12);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(saved, v);
}

#[test]
fn stefan_reports_plateau() {
    let v = json_stdout(&tentflex(&["stefan", "--a", "0.4", "--n", "20"]));
    assert!((v["plateau"].as_f64().unwrap() - 1.31416).abs() < 1e-5);
    assert!(v["l1_distance"].as_f64().unwrap() <= 0.05);
}

#[test]
fn root_output_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("map.json");
    let root = dir.path().join("root.json");
    let again = dir.path().join("root2.json");
    std::fs::write(&input, r#"{"s": 2.3, "t": 1.7}"#).unwrap();
    assert!(
        tentflex(&["root", "--in", path_str(&input), "--out", path_str(&root)])
            .status
            .success()
    );
    let g: PlUnimodalMap = serde_json::from_str(&std::fs::read_to_string(&root).unwrap()).unwrap();
    assert!(g.min_abs_slope() > 1.0);
    // a root of a root, read through the piecewise linear schema
    let out = tentflex(&["root", "--in", path_str(&root), "--out", path_str(&again)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let gg: PlUnimodalMap =
        serde_json::from_str(&std::fs::read_to_string(&again).unwrap()).unwrap();
    assert!(gg.breakpoints().len() > g.breakpoints().len());
}

#[test]
fn ulam_entropy_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("map.json");
    let csv = dir.path().join("ulam.csv");
    std::fs::write(&input, r#"{"s": 2, "t": 2}"#).unwrap();
    let out = tentflex(&[
        "ulam",
        "--in",
        path_str(&input),
        "--bins",
        "256",
        "--csv",
        path_str(&csv),
    ]);
    let v = json_stdout(&out);
    assert!((v["h_mu"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-6);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 257);
}

#[test]
fn identity_table() {
    let out = tentflex(&["identity", "--s", "2.3", "--t", "1.7", "--terms", "60"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,partial_sum,tail_bound");
    assert_eq!(rows.len(), 62);
    for row in &rows[1..] {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1].abs() <= f[2] + 1e-15);
    }
}

#[test]
fn sweep_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("sweep.json");
    let v = json_stdout(&tentflex(&[
        "sweep",
        "--grid",
        "8",
        "--report",
        path_str(&report),
    ]));
    let full: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(full["entries"].as_array().unwrap().len(), 64);
    assert_eq!(full["global_max"], v["global_max"]);
}

#[test]
fn output_is_reproducible() {
    let a = tentflex(&["entropy", "--s", "3.1", "--t", "1.3"]);
    let b = tentflex(&["entropy", "--s", "3.1", "--t", "1.3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validation_errors_exit_with_2() {
    for args in [
        vec!["entropy", "--s", "0.5", "--t", "2"],
        vec!["entropy", "--s", "3", "--t", "3"],
        vec!["density", "--s", "two", "--t", "2"],
        vec!["solve", "--a", "0.3", "--b", "0.1"],
        vec!["solve", "--a", "0.5", "--b", "0.6"],
        vec!["stefan", "--a", "0.6", "--n", "3"],
        vec!["identity", "--s", "2", "--t", "2", "--terms", "0"],
        vec!["sweep", "--grid", "0"],
        vec!["frobnicate"],
    ] {
        let out = tentflex(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn bad_map_files_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("map.json");
    let out = dir.path().join("out.json");
    for text in [
        "not json",
        r#"{"slope": 2}"#,
        r#"{"s": 2}"#,
        r#"{"breakpoints": [0, 0.5, 1], "values": [0.9, 1, 0]}"#,
    ] {
        std::fs::write(&input, text).unwrap();
        let r = tentflex(&["root", "--in", path_str(&input), "--out", path_str(&out)]);
        assert_eq!(r.status.code(), Some(2), "{text}");
    }
    let r = tentflex(&[
        "root",
        "--in",
        path_str(&dir.path().join("missing.json")),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    std::fs::write(&input, r#"{"s": 2, "t": 2}"#).unwrap();
    let r = tentflex(&[
        "root",
        "--in",
        path_str(&input),
        "--out",
        path_str(&out),
        "--eps",
        "5",
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn solver_failures_exit_with_3() {
    // entropy too small for the determinant length cap
    let out = tentflex(&["solve", "--a", "0.001", "--b", "0.0005", "--unimodal"]);
    assert_eq!(out.status.code(), Some(3));
}
