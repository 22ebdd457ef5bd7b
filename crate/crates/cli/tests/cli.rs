use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qpot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpot")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn check<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_ground_state_passes_with_saturation() {
    let out = qpot(&["verify", "--state", "ho", "--n", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(check(&doc, "theorem4_chain")["pass"], true);
    assert_eq!(check(&doc, "ho_mvqp_closed_form")["pass"], true);
}

#[test]
fn verify_two_dimensional_gaussian() {
    let out = qpot(&["verify", "--state", "gaussian", "--dim", "2", "--vdiag", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(check(&doc, "gaussian_equality_grid")["pass"], true);
    assert!(doc["skipped"].as_array().unwrap().iter().any(|s| s["name"] == "theorem4_chain"));
}

#[test]
fn verify_thermal_chain() {
    let out = qpot(&["verify", "--state", "thermal", "--beta-hnu", "1", "--K", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(check(&doc, "theorem3_chain")["pass"], true);
    assert_eq!(check(&doc, "thermal_mvqp_closed_form")["pass"], true);
}

#[test]
fn insufficient_thermal_truncation_is_a_config_error() {
    let out = qpot(&["verify", "--state", "thermal", "--beta-hnu", "0.5", "--K", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_inverted_oscillator_saturates() {
    let out = qpot(&["report", "--state", "inverted", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["mvqp_width_saturated"], true);
    let v = doc["covariance"]["v"][0][0].as_f64().unwrap();
    assert!((v / (0.5 * 1.0f64.cosh()) - 1.0).abs() < 1e-6);
}

#[test]
fn report_squeezed_per_dof() {
    let out = qpot(&["report", "--state", "squeezed", "--a", "2", "--t", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let d = &doc["per_dof_mvqp"][0];
    let (grid, closed) = (d["mvqp"].as_f64().unwrap(), d["closed_form"].as_f64().unwrap());
    assert!((grid / closed - 1.0).abs() < 1e-5);
    let c = 1.0f64.cos().powi(2) + 1.0f64.sin().powi(2) / 16.0;
    assert!((closed - 1.0 / (8.0 * 2.0 * c)).abs() < 1e-12);
}

#[test]
fn figure1_rows() {
    let out = qpot(&["figure1", "--mu", "1..10", "--n", "1,2,3,5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n=2"));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 40);
    for chunk in rows.chunks(4) {
        let b: Vec<f64> = chunk.iter().map(|r| r[2].parse().unwrap()).collect();
        let q: f64 = chunk[0][3].parse().unwrap();
        assert!((b[0] / q - 1.0).abs() < 1e-6);
        assert_eq!(b[1], 0.0);
        assert!(b[0] > b[2] && b[2] > b[3]);
    }
}

#[test]
fn figure2_monotone_and_range_checked() {
    let out = qpot(&["figure2", "--mu", "1..40"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let diffs: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(diffs.iter().all(|d| *d > 0.0));
    assert!(diffs.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(qpot(&["figure2", "--mu", "1..61"]).status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(qpot(&["verify", "--state", "nonsense"]).status.code(), Some(2));
    assert_eq!(qpot(&["verify", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(qpot(&["report", "--state", "missing.csv"]).status.code(), Some(2));
    assert_eq!(qpot(&["report", "--hbar", "1,2"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = qpot(&["verify", "--state", "pt", "--mu", "2", "--seed", "5"]);
    let b = qpot(&["verify", "--state", "pt", "--mu", "2", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_state_round_trip() {
    let path = scratch("boosted.csv");
    let grid = qpot_core::numerics::Grid::line(-10.0, 10.0, 513).unwrap();
    let s = qpot_core::mixed::chirped_gaussian(0.7, 0.2, 0.9, 0.3, &grid, 1.0).unwrap();
    qpot_core::states::write_state_csv(&s, &path).unwrap();
    let out = qpot(&["verify", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let doc = json(&qpot(&["report", "--state", path.to_str().unwrap()]));
    let vc = doc["covariance"]["vc"][0][0].as_f64().unwrap();
    // chirp χ on variance V gives Cov(∂S, ∂S) = χ²V.
    assert!((vc - 0.09 * 0.7).abs() < 1e-6);
}

#[test]
fn mixture_file_report() {
    let path = scratch("mix.json");
    std::fs::write(
        &path,
        r#"{"grid": {"lower": -14, "upper": 14, "points": 513},
            "components": [
              {"weight": 0.5, "state": {"type": "gaussian", "variance": 1.0, "momentum": 1.0}},
              {"weight": 0.5, "state": {"type": "gaussian", "variance": 1.0, "momentum": -1.0}}]}"#,
    )
    .unwrap();
    let out = qpot(&["report", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    let delta = doc["vnc_decomposition"]["delta"][0][0].as_f64().unwrap();
    assert!((delta - 1.0).abs() < 1e-8);
    assert_eq!(qpot(&["verify", "--state", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn sweep_over_hbar() {
    let out = qpot(&["sweep", "--state", "ho", "--n", "1", "--hbar", "0.5,1,2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    for r in doc["rows"].as_array().unwrap() {
        let (h, q) = (r["hbar"].as_f64().unwrap(), r["mvqp"].as_f64().unwrap());
        assert!((q / (3.0 * h / 4.0) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("fig2.csv");
    let out = qpot(&["figure2", "--mu", "1..3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# units=hbar^2/2m = 1"));
    assert_eq!(csv_rows(&text).len(), 3);
}
