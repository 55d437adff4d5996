use std::process::{Command, Output};

use serde_json::Value;

fn rayq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rayq")).args(args).output().expect("run rayq")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn analyze_infinite() {
    let v = json(&rayq(&["analyze", "--theta", "0.5"]));
    assert_eq!(v["schema"], "rayq.analyze/1");
    assert!((v["infinite"]["mean_queue_length"].as_f64().unwrap() - 0.75).abs() < 1e-15);
    assert!(v.get("finite").is_none());
}

#[test]
fn analyze_finite_matches_library() {
    let v = json(&rayq(&["analyze", "--theta", "0.5", "--buffer", "10"]));
    let p = v["finite"]["overflow_probability"].as_f64().unwrap();
    let exact = rayleigh_queue::finite::overflow_probability(0.5, 10).unwrap();
    assert!((p - exact).abs() <= 1e-15 * exact);
    assert_eq!(v["finite"]["probabilities"].as_array().unwrap().len(), 11);
}

#[test]
fn analyze_physical_path() {
    // rho = 2 * 0.1 / (5e6 * N0 * 1e12) = 4 with N0 = 1e-20
    let v = json(&rayq(&["analyze", "--rate", "1e7", "--noise-density", "1e-20"]));
    assert!((v["theta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let out = rayq(&["analyze", "--rate", "1e7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unstable_load_is_rejected() {
    let out = rayq(&["analyze", "--theta", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("queue unstable"));
}

#[test]
fn missing_load_is_a_usage_error() {
    assert_eq!(rayq(&["simulate"]).status.code(), Some(2));
    assert_eq!(rayq(&["analyze", "--theta", "0.5", "--rate", "3"]).status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--theta", "0.5", "--blocks", "50000", "--replications", "3", "--seed", "9"];
    let (a, b) = (rayq(&args), rayq(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_defaults_cover_mean() {
    let v = json(&rayq(&["simulate", "--theta", "0.5"]));
    assert_eq!(v["schema"], "rayq.simulate/1");
    let est = &v["stats"]["mean_queue_at_block_start"];
    assert!(est["lower"].as_f64().unwrap() <= 0.75 && 0.75 <= est["upper"].as_f64().unwrap());
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = rayq(&[
        "simulate", "--theta", "0.5", "--blocks", "20000", "--replications", "1", "--trace", trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(trace).unwrap();
    assert_eq!(text.lines().count(), 20_001);
    assert!(text.starts_with("block,backlog_nats"));
}

#[test]
fn compare_infinite_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = rayq(&["compare", "--theta", "0.5", "--fail-on-flag", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema"], "rayq.compare/1");
    for row in v["rows"].as_array().unwrap() {
        assert!(row["z"].as_f64().unwrap().abs() <= 3.0);
    }
}

#[test]
fn compare_finite_has_overflow_row() {
    let out = rayq(&["compare", "--theta", "0.5", "--buffer", "10", "--format", "json"]);
    let v = json(&out);
    assert!(v["rows"].as_array().unwrap().iter().any(|r| r["metric"] == "overflow_probability"));
}

#[test]
fn perturbed_compare_fails() {
    let out = rayq(&["compare", "--theta", "0.5", "--blocks", "100000", "--perturb", "0.1", "--fail-on-flag"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FLAG"));
}

#[test]
fn fig10_log_overflow_decreases_linearly() {
    let out = rayq(&["sweep", "--fig", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# fig10"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 30);
    // column 4 holds log10 P at theta = 0.5
    let logs: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    assert!(logs.windows(2).all(|w| w[1] < w[0]));
    let steps: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    assert!((steps[28] - steps[27]).abs() < 1e-3);
}

#[test]
fn fig5_mean_increases() {
    let text = String::from_utf8(rayq(&["sweep", "--fig", "5"]).stdout).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 19);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    assert!(rows.last().unwrap()[1] > 9.0);
}

#[test]
fn fig7_vestige_bounded() {
    let text = String::from_utf8(rayq(&["sweep", "--fig", "7"]).stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("finite_delay_k20"));
    for r in data_rows(&text) {
        assert!(r[4] > 0.0 && r[4] < 0.5);
    }
}

#[test]
fn sweep_all_figures_and_bad_grids() {
    let dir = tempfile::tempdir().unwrap();
    assert!(rayq(&["sweep", "--out", dir.path().to_str().unwrap()]).status.success());
    for f in 5..=10 {
        let text = std::fs::read_to_string(dir.path().join(format!("fig{f}.csv"))).unwrap();
        assert!(text.starts_with(&format!("# fig{f}")));
    }
    let nine = std::fs::read_to_string(dir.path().join("fig9.csv")).unwrap();
    assert_eq!(data_rows(&nine).len(), 11);
    assert_eq!(rayq(&["sweep", "--fig", "5", "--grid", "0.5,0.4"]).status.code(), Some(2));
    assert_eq!(rayq(&["sweep", "--fig", "6", "--grid", "0.5,1.0"]).status.code(), Some(2));
    assert_eq!(rayq(&["sweep", "--fig", "10", "--grid", "1.5"]).status.code(), Some(2));
    assert_eq!(rayq(&["sweep", "--fig", "4"]).status.code(), Some(2));
}

#[test]
fn sweeps_are_deterministic() {
    let a = rayq(&["sweep", "--fig", "8"]);
    let b = rayq(&["sweep", "--fig", "8"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn matrix_dump() {
    let out = rayq(&["matrix", "--theta", "0.5", "--buffer", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((last[3] - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
}
