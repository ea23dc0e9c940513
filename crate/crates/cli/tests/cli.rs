use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bootperc::span::SpanResult;
use serde_json::Value;

fn bootperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bootperc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const PLAIN_2X2: &str = r#"{"family":"plain","n":2,"d":2,"r":2}"#;

#[test]
fn lambda_prints_seven_significant_digits() {
    let out = bootperc(&["lambda", "--d", "3", "--r", "3"]);
    assert_eq!(stdout(&out).trim(), "0.4039127");
    let config = String::from_utf8_lossy(&out.stderr);
    assert!(config.contains("\"tol\":1e-8"), "{config}");
}

#[test]
fn lgap_exact_without_gaps_is_one() {
    let out = bootperc(&["lgap", "--ell", "0", "--m", "0", "--u", "0.4", "--exact"]);
    assert_eq!(stdout(&out).trim().parse::<f64>().unwrap(), 1.0);
}

#[test]
fn lambda_table_csv_has_header_and_all_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = bootperc(&["lambda-table", "--dmax", "3", "--out", path.to_str().unwrap()]);
    stdout(&out);
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "d,r,lambda,absTol");
    assert_eq!(lines.len(), 1 + 3);
    assert!(lines[1].starts_with("2,2,0.54831"), "{}", lines[1]);
}

#[test]
fn estimate_percolation_on_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", PLAIN_2X2);
    let out = bootperc(&[
        "estimate", "--event", "percolates", "--structure", &s, "--p", "0.5", "--trials", "40000",
        "--seed", "3",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let p_hat = v["p_hat"].as_f64().unwrap();
    let exact = 2.0 * 0.25 - 0.0625;
    let sigma = (exact * (1.0 - exact) / 40000.0f64).sqrt();
    assert!((p_hat - exact).abs() <= 4.0 * sigma, "{p_hat}");
    assert!(v["ci_low"].as_f64().unwrap() <= p_hat && p_hat <= v["ci_high"].as_f64().unwrap());
}

#[test]
fn span_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "g.json",
        r#"{"structure":{"family":"plain","n":6,"d":2,"r":2},"infected":[[1,1],[1,2],[5,5],[6,6]]}"#,
    );
    let main: SpanResult = serde_json::from_str(&stdout(&bootperc(&["span", "--input", &grid]))).unwrap();
    let direct: SpanResult =
        serde_json::from_str(&stdout(&bootperc(&["span", "--input", &grid, "--direct"]))).unwrap();
    assert_eq!(main.rectangles, direct.rectangles);
    assert_eq!(main.rectangles.len(), 2);
}

#[test]
fn closure_fills_diagonal_square() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "g.json",
        r#"{"structure":{"family":"plain","n":2,"d":2,"r":2},"infected":[[1,1],[2,2]]}"#,
    );
    let v: Value = serde_json::from_str(&stdout(&bootperc(&["closure", "--input", &grid]))).unwrap();
    assert_eq!(v["infected"].as_array().unwrap().len(), 4);
}

#[test]
fn witness_reports_both_objects() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "g.json",
        r#"{"structure":{"family":"plain","n":8,"d":2,"r":2},"infected":[[1,1],[2,2],[3,3],[4,4],[5,5]]}"#,
    );
    let v: Value =
        serde_json::from_str(&stdout(&bootperc(&["witness", "--input", &grid, "--L", "2"]))).unwrap();
    assert!(v["rectangle"].is_object());
    let diam = v["component_diameter"].as_u64().unwrap();
    assert!((2..=4).contains(&diam), "{v}");
}

#[test]
fn exit_codes_distinguish_failures() {
    assert_eq!(bootperc(&["lambda", "--d", "3", "--bogus", "1"]).status.code(), Some(1));
    assert_eq!(bootperc(&["beta", "--k", "0", "--u", "0.5"]).status.code(), Some(1));
    assert_eq!(bootperc(&["closure", "--input", "/definitely/missing.json"]).status.code(), Some(3));
    assert_eq!(bootperc(&["lambda", "--d", "3", "--r", "3", "--tol", "1e-30"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"structure\": ");
    assert_eq!(bootperc(&["closure", "--input", &bad]).status.code(), Some(1));
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.json",
        &format!(
            r#"{{"master_seed":11,"grid":[{{"structure":{PLAIN_2X2},"event":{{"kind":"percolates"}},"p":[0.2,0.6],"trials":500}}]}}"#
        ),
    );
    let run = |name: &str| {
        let out = dir.path().join(name);
        stdout(&bootperc(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]));
        fs::read_to_string(out).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert_eq!(first.lines().count(), 3);
    assert!(first.starts_with("family,n,d,ell,k,r,event,p,trials,pHat,ciLow,ciHigh,seed"));
}
