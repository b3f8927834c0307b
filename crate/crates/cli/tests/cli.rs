use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeboundary")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name).to_string_lossy().into_owned()
}

#[test]
fn halfspace_json_report() {
    let o = run(&["halfspace", "--q", "0", "--n", "2", "--samples", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "weiss_closed_form"));
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn weiss_csv_rows() {
    let o = run(&["weiss", "--q", "0.5", "--n", "3", "--radii", "0.2,0.4", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,W");
    assert_eq!(lines.len(), 3);
    let w: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((w[0] - w[1]).abs() < 1e-6 * w[0]);
}

#[test]
fn check_batteries_exit_zero() {
    for args in [
        vec!["ode-check", "--trials", "10"],
        vec!["metric-check", "--samples", "100", "--seed", "3"],
        vec!["deglin-solve", "--gamma", "3"],
        vec!["diffeo-check", "--a=-0.05,0.1"],
        vec!["diffeo-check", "--a", "0.05"],
    ] {
        let o = run(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn invalid_input_is_an_error() {
    let o = run(&["diffeo-check", "--a", "2.0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["halfspace", "--q", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["halfspace", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pipeline_writes_report_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["pipeline", "--config", &scenario("flat.toml"), "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("flat.json")).unwrap()).unwrap();
    assert_eq!(report["scenario"], "flat");
    let weiss = fs::read_to_string(dir.path().join("flat_weiss.csv")).unwrap();
    assert!(weiss.starts_with("r,W"));
    assert!(dir.path().join("flat_residual.csv").exists());
}

#[test]
fn pipeline_reports_smallness_violation() {
    let o = run(&["pipeline", "--config", &scenario("too_large.toml"), "--format", "csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("smallness violated"));
    assert!(stdout(&o).contains("config"));
}

#[test]
fn pipeline_rejects_unknown_plot() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("flat.toml")).unwrap().replace("\"weiss\", \"residual\"", "\"contours\"");
    let path = dir.path().join("bad.toml");
    fs::write(&path, text).unwrap();
    let o = run(&["pipeline", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("contours") && err.contains("fb, weiss, norms, residual"), "{err}");
}

#[test]
fn ck_solve_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.series");
    fs::write(&data, "dim 2 order 8\n2 0 : 0.02\n").unwrap();
    let report = dir.path().join("ck.json");
    let o = run(&[
        "ck-solve",
        "--q",
        "0.5",
        "--m",
        "1",
        "--n",
        "2",
        "--order",
        "8",
        "--data",
        data.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["coefficients"].as_str().unwrap().starts_with("dim 2 order 8"));
    assert_eq!(v["order_norms"].as_array().unwrap().len(), 9);
    assert!(v["residual_max"].as_f64().unwrap() < 1e-10);
}

#[test]
fn ck_solve_rejects_large_slope() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.series");
    fs::write(&data, "dim 2 order 4\n1 0 : 0.5\n").unwrap();
    let o = run(&["ck-solve", "--order", "4", "--data", data.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("smallness violated"));
}

#[test]
fn direct_transform_residual_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["direct-solve", "--count", "17", "--out", out, "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let grid = dir.path().join("direct.grid");
    let v = dir.path().join("v.grid");
    let o = run(&["transform", "--input", grid.to_str().unwrap(), "--q", "0.5", "--out", v.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read(&v).unwrap().starts_with(b"FBGRID v1"));
    let o = run(&["residual", "--mode", "original", "--in", grid.to_str().unwrap(), "--q", "0.5", "--tol", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn residual_of_zero_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("zero.series");
    fs::write(&state, "dim 3 order 6\ndim 3 order 6\n").unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["residual", "--mode", "system", "--in", state.to_str().unwrap(), "--q", "0.25", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["checks"][0]["measured"].as_f64().unwrap(), 0.0);
}
