//! End-to-end tests of the `cubicreg` binary: subcommand flows and the exit
//! code contract (0 success/pass, 1 validation failure, 2 input error, 3
//! runtime error).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cubicreg")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

const CR_CONFIG: &str = r#"{
    "objective": {"name": "norm_power", "params": {"p": 4, "dim": 3}},
    "algorithm": {"kind": "cr", "m": "auto", "mu_tol": 1e-8, "max_iter": 3000},
    "x0": {"random_sphere": {"radius": 1.0, "seed": 3}},
    "seed": 5
}"#;

#[test]
fn run_then_validate_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", CR_CONFIG);
    let out_dir = dir.path().join("out");

    let out = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let trace = out_dir.join("trace.csv");
    assert!(trace.exists());
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("iterates.csv").exists());

    // L and M for norm_power(4,3) calibrated at radius 1
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let l = summary["config"]["l_bound"].as_f64().unwrap();
    let m = summary["config"]["m"].as_f64().unwrap();

    let out = run(&[
        "validate",
        "--trace",
        trace.to_str().unwrap(),
        "--objective",
        "norm_power",
        "--params",
        r#"{"p": 4, "dim": 3}"#,
        "--L",
        &l.to_string(),
        "--M",
        &m.to_string(),
    ]);
    assert!(out.status.success(), "validate failed: {}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));

    let out = run(&[
        "report",
        "--trace",
        trace.to_str().unwrap(),
        "--theta",
        "0.25",
        "--measures",
        "fgap,mu,dist_omega,iterate_dist",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fgap"), "{text}");
    assert!(text.contains("iterate_dist"), "{text}");

    // json export
    let json_path = dir.path().join("rates.json");
    let out = run(&[
        "report",
        "--trace",
        trace.to_str().unwrap(),
        "--objective",
        "norm_power",
        "--params",
        r#"{"p": 4, "dim": 3}"#,
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(table["theta"], 0.25);
}

#[test]
fn exit_code_2_on_input_errors() {
    let dir = tempfile::tempdir().unwrap();

    let bad_json = write(dir.path(), "bad.json", "{ not json");
    let out = run(&["run", "--config", bad_json.to_str().unwrap(), "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    // serde errors carry line/column diagnostics
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"objective": {"name": "mystery", "params": {}},
            "algorithm": {"kind": "cr"}, "x0": [1.0], "seed": 0}"#,
    );
    let out = run(&["run", "--config", unknown.to_str().unwrap(), "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));

    let junk_trace = write(dir.path(), "junk.csv", "definitely,not,a,trace\n");
    let out = run(&[
        "validate",
        "--trace",
        junk_trace.to_str().unwrap(),
        "--objective",
        "norm_power",
        "--params",
        r#"{"p": 4, "dim": 3}"#,
        "--L",
        "1",
        "--M",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["report", "--trace", junk_trace.to_str().unwrap(), "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_3_on_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    // GD far above 1/L_grad on a quadratic diverges and aborts
    let cfg = write(
        dir.path(),
        "diverge.json",
        r#"{
            "objective": {"name": "quadratic", "params": {"diag": [1.0]}},
            "algorithm": {"kind": "gd", "step_size": 3.0, "grad_tol": 1e-10, "max_iter": 100},
            "x0": [1.0],
            "seed": 0
        }"#,
    );
    let out = run(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    // nothing partial left behind
    assert!(!dir.path().join("o").join("trace.csv").exists());
}

#[test]
fn exit_code_1_on_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", CR_CONFIG);
    let out_dir = dir.path().join("out");
    let out = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());

    // validating with an understated M makes the descent row fail
    let trace = out_dir.join("trace.csv");
    let out = run(&[
        "validate",
        "--trace",
        trace.to_str().unwrap(),
        "--objective",
        "norm_power",
        "--params",
        r#"{"p": 4, "dim": 3}"#,
        "--L",
        "1e6",
        "--M",
        "1e6",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn compare_cr_vs_gd_on_same_objective() {
    let dir = tempfile::tempdir().unwrap();
    let cr = write(
        dir.path(),
        "cr.json",
        r#"{
            "objective": {"name": "norm_power", "params": {"p": 4, "dim": 1}},
            "algorithm": {"kind": "cr", "mu_tol": 1e-12, "max_iter": 10000},
            "x0": [1.0],
            "seed": 1
        }"#,
    );
    let gd = write(
        dir.path(),
        "gd.json",
        r#"{
            "objective": {"name": "norm_power", "params": {"p": 4, "dim": 1}},
            "algorithm": {"kind": "gd", "step_size": "auto", "grad_tol": 1e-14, "max_iter": 10000},
            "x0": [1.0],
            "seed": 1
        }"#,
    );
    let out = run(&["compare", "--config-a", cr.to_str().unwrap(), "--config-b", gd.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fgap"), "{text}");
    assert!(text.contains("Gd"), "{text}");

    // mismatched objectives are an input error
    let other = write(
        dir.path(),
        "other.json",
        &CR_CONFIG.replace("\"dim\": 3", "\"dim\": 2"),
    );
    let out = run(&["compare", "--config-a", cr.to_str().unwrap(), "--config-b", other.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
