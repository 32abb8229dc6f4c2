//! End-to-end tests of the `blockop` binary: document round-trips,
//! exit-code contract, and sweep determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_blockop")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("BLOCKOP_TOL")
        .output()
        .expect("binary runs")
}

fn write_matrix(dir: &Path, name: &str, rows: usize, cols: usize, entries: &[(f64, f64)]) {
    let body: Vec<String> = entries.iter().map(|(re, im)| format!("[{re},{im}]")).collect();
    fs::write(
        dir.join(name),
        format!(r#"{{"rows":{rows},"cols":{cols},"entries":[{}]}}"#, body.join(",")),
    )
    .unwrap();
}

fn write_ex1_block(dir: &Path, name: &str, b: f64, c: f64) {
    fs::write(
        dir.join(name),
        format!(
            r#"{{
  "a0": {{"rows":1,"cols":1,"entries":[[-0.5,0.0]]}},
  "a1": {{"rows":1,"cols":1,"entries":[[0.5,0.0]]}},
  "b":  {{"rows":1,"cols":1,"entries":[[{b},0.0]]}},
  "c":  {{"rows":1,"cols":1,"entries":[[{c},0.0]]}}
}}"#
        ),
    )
    .unwrap();
}

#[test]
fn solve_sylvester_kron_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_matrix(dir.path(), "a0.json", 1, 1, &[(0.0, 0.0)]);
    write_matrix(dir.path(), "a1.json", 1, 1, &[(1.0, 0.0)]);
    write_matrix(dir.path(), "y.json", 1, 1, &[(1.0, 0.0)]);
    let out = run(
        &["solve-sylvester", "--a0", "a0.json", "--a1", "a1.json", "--y", "y.json", "--method", "kron"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let x = doc["x"]["entries"][0][0].as_f64().unwrap();
    assert!((x + 1.0).abs() < 1e-12);
    assert_eq!(doc["method"], "kron");
}

#[test]
fn solve_sylvester_methods_agree_through_documents() {
    let dir = tempfile::tempdir().unwrap();
    write_matrix(dir.path(), "a0.json", 2, 2, &[(-2.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.5, 0.0)]);
    write_matrix(dir.path(), "a1.json", 1, 1, &[(1.5, 0.0)]);
    write_matrix(dir.path(), "y.json", 1, 2, &[(0.3, 0.1), (-0.2, 0.7)]);
    let kron = run(
        &["solve-sylvester", "--a0", "a0.json", "--a1", "a1.json", "--y", "y.json", "--method", "kron"],
        dir.path(),
    );
    let semi = run(
        &[
            "solve-sylvester",
            "--a0",
            "a0.json",
            "--a1",
            "a1.json",
            "--y",
            "y.json",
            "--method",
            "semigroup",
            "--delta",
            "3.0",
        ],
        dir.path(),
    );
    assert!(kron.status.success() && semi.status.success());
    let dk: serde_json::Value = serde_json::from_slice(&kron.stdout).unwrap();
    let ds: serde_json::Value = serde_json::from_slice(&semi.stdout).unwrap();
    for i in 0..2 {
        for part in 0..2 {
            let a = dk["x"]["entries"][i][part].as_f64().unwrap();
            let b = ds["x"]["entries"][i][part].as_f64().unwrap();
            assert!((a - b).abs() < 1e-9, "entry {i}.{part}: {a} vs {b}");
        }
    }
}

#[test]
fn riccati_verify_and_diagonalize_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_ex1_block(dir.path(), "block.json", 0.4, -0.4);

    let out = run(&["solve-riccati", "--block", "block.json", "--delta", "1.0"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["norm"].as_f64().unwrap() - 0.5).abs() < 1e-10);

    let out = run(&["diagonalize", "--block", "block.json", "--delta", "1.0"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["similarity_residual"].as_f64().unwrap() < 1e-9);

    let out = run(&["verify-tpi", "--block", "block.json"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["disposition"], "subordinated");
    assert_eq!(doc["hypothesis_ok"], true);
    assert_eq!(doc["spectrum_real"], true);
}

#[test]
fn verify_tpi_outside_regime_reports_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    // ExNS with b = 2 > d/2: complex spectrum, informational report.
    write_ex1_block(dir.path(), "block.json", 2.0, -2.0);
    let out = run(&["verify-tpi", "--block", "block.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["hypothesis_ok"], false);
    assert_eq!(doc["spectrum_real"], false);
}

#[test]
fn verify_tpi_rejects_non_j_block_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    write_ex1_block(dir.path(), "block.json", 0.4, 0.4); // C = +B†: not J
    let out = run(&["verify-tpi", "--block", "block.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oscillator_report_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oscillator", "--n", "12", "--beta", "0.3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["disposition"], "generic");
    assert!((doc["d"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(doc["spectrum_real"], true);

    let out = run(
        &["oscillator", "--n", "8", "--beta", "0.2", "--emit-matrices"],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["operator"]["a0"]["rows"], 4);
}

#[test]
fn oscillator_accepts_file_potential() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pot.json"), r#"{"coeffs":[0.0,1.0],"gauss":true}"#).unwrap();
    let builtin = run(&["oscillator", "--n", "10", "--beta", "0.25"], dir.path());
    let from_file = run(
        &["oscillator", "--n", "10", "--beta", "0.25", "--potential", "file:pot.json"],
        dir.path(),
    );
    assert!(builtin.status.success() && from_file.status.success());
    let a: serde_json::Value = serde_json::from_slice(&builtin.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    let va = a["v_norm"].as_f64().unwrap();
    let vb = b["v_norm"].as_f64().unwrap();
    assert!((va - vb).abs() < 1e-13, "{va} vs {vb}");

    // Even coefficients are rejected.
    fs::write(dir.path().join("bad.json"), r#"{"coeffs":[1.0],"gauss":true}"#).unwrap();
    let out = run(
        &["oscillator", "--n", "10", "--beta", "0.25", "--potential", "file:bad.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_is_deterministic_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("config.json"),
        r#"{
  "seed": 7,
  "disposition": "annular_gap",
  "sizes": [2, 3],
  "d": 1.0,
  "v_norm_grid": [0.1, 0.45],
  "trials": 2,
  "output": {"path": "sweep.csv", "format": "csv"}
}"#,
    )
    .unwrap();
    let out1 = run(&["sweep", "--config", "config.json"], dir.path());
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let csv1 = fs::read(dir.path().join("sweep.csv")).unwrap();
    let out2 = run(&["sweep", "--config", "config.json"], dir.path());
    assert!(out2.status.success());
    let csv2 = fs::read(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv1, csv2, "identical config must produce byte-identical CSV");
    let text = String::from_utf8(csv1).unwrap();
    assert_eq!(text.lines().count(), 1 + 4, "header plus one row per cell");
}

#[test]
fn sweep_rejects_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("config.json"),
        r#"{"seed":1,"disposition":"generic","sizes":[1,2],"d":1.0,"v_norm_grid":[0.1],"trials":1}"#,
    )
    .unwrap();
    let out = run(&["sweep", "--config", "config.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reproduce_examples_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce", "ex1", "--d", "1.0", "--b", "0.4", "--c", "0.4"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["k_norm"].as_f64().unwrap() - 0.5).abs() < 1e-10);

    let out = run(&["reproduce", "exns", "--d", "2.0", "--b", "1.0"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["reality"]["spectrum_real"], true);
    assert_eq!(doc["reality"]["diagonalizable"], false);

    let out = run(&["reproduce", "exns", "--d", "2.0", "--b", "2.0"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["reality"]["spectrum_real"], false);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["solve-riccati", "--block", "missing.json", "--delta", "1.0"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(bin())
        .args(["reproduce", "ex1"])
        .env("BLOCKOP_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tolerance_env_var_reaches_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    write_ex1_block(dir.path(), "block.json", 0.4, -0.4);
    // A loose tolerance converges in fewer iterations than the default.
    let loose = Command::new(bin())
        .args(["solve-riccati", "--block", "block.json", "--delta", "1.0"])
        .current_dir(dir.path())
        .env("BLOCKOP_TOL", "1e-3")
        .output()
        .unwrap();
    let tight = run(&["solve-riccati", "--block", "block.json", "--delta", "1.0"], dir.path());
    let dl: serde_json::Value = serde_json::from_slice(&loose.stdout).unwrap();
    let dt: serde_json::Value = serde_json::from_slice(&tight.stdout).unwrap();
    assert!(
        dl["iterations"].as_u64().unwrap() < dt["iterations"].as_u64().unwrap(),
        "loose {} vs tight {}",
        dl["iterations"],
        dt["iterations"]
    );
}
