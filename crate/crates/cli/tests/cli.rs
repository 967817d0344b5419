//! End-to-end runs of the `monoqt` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn monoqt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monoqt"))
        .args(args)
        .env("MONOQT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn report_ou_residual() {
    let out = monoqt(&["report", "Ou", "1.0"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["residual"].as_f64().unwrap(), 0.777777777778);
    assert_eq!(doc["n_ab"].as_f64().unwrap(), 0.333333333333);
    assert_eq!(doc["capability"]["t_ab"].as_f64().unwrap(), 0.0);
}

#[test]
fn report_ks_shows_computed_and_closed_form() {
    let doc = stdout_json(&monoqt(&["report", "KS", "1.0"]));
    assert_eq!(doc["n_a_bc"].as_f64().unwrap(), 1.0);
    assert_eq!(doc["n_ab"].as_f64().unwrap(), 0.333333333333);
    assert_eq!(doc["closed_form"]["n_ab"].as_f64().unwrap(), 0.471404520791);
    assert_eq!(doc["notes"].as_array().unwrap().len(), 2);
}

#[test]
fn report_oup_at_zero_is_all_zero() {
    let doc = stdout_json(&monoqt(&["report", "Ou_p", "0.0"]));
    for key in ["n_a_bc", "n_ab", "n_ac", "residual"] {
        assert_eq!(doc[key].as_f64().unwrap(), 0.0, "{key}");
    }
}

#[test]
fn report_rejects_bad_arguments() {
    for args in [
        &["report", "nosuchstate"][..],
        &["report", "Ou_p"],
        &["report", "Ou_p", "1.5"],
        &["report", "KS", "0.3"],
        &["report", "GHZ3", "0.5"],
        &["report"],
        &["sweep", "Ou", "--out", "/tmp"],
    ] {
        assert_eq!(code(&monoqt(args)), 2, "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_monoqt"))
        .args(["report", "Ou"])
        .env("MONOQT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn oup_sweep_matches_and_contains_branch_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = monoqt(&["sweep", "Ou_p", "--grid", "11", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().any(|r| r.starts_with("0.857142857143,")));
    assert!(csv.lines().next().unwrap().ends_with(",branch"));
    assert!(rows.iter().any(|r| r.ends_with(",high")));
    assert!(dir.path().join("sweep.svg").exists());
}

#[test]
fn ksp_sweep_reports_the_closed_form_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = monoqt(&["sweep", "KS_p", "--grid", "11", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 3);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(
        last.starts_with("1.00000000000,0.555555555556,0.777777777778"),
        "{last}"
    );

    let loose = monoqt(&[
        "sweep",
        "KS_p",
        "--grid",
        "11",
        "--tolerance",
        "0.5",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&loose), 0);
}

#[test]
fn sample_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = monoqt(&[
        "sample",
        "--n",
        "100",
        "--sampler",
        "haar",
        "--seed",
        "1",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let summary = stdout_json(&out);
    assert_eq!(summary["n"], 100);
    assert_eq!(summary["violations"], 0);
    let csv = fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
    assert_eq!(fs::read(dir.path().join("summary.json")).unwrap(), out.stdout);
    assert!(dir.path().join("scatter.svg").exists());
    assert!(!dir.path().join("violations.json").exists());
}

#[test]
fn sample_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = monoqt(&[
            "sample",
            "--n",
            "10",
            "--sampler",
            "canonical",
            "--seed",
            "7",
            "--out",
            path_str(dir.path()),
        ]);
        assert_eq!(code(&out), 0);
    }
    for file in ["samples.csv", "scatter.svg", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn sample_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let p = path_str(dir.path());
    assert_eq!(code(&monoqt(&["sample", "--n", "0", "--out", p])), 2);
    assert_eq!(
        code(&monoqt(&["sample", "--n", "5", "--sampler", "named", "--out", p])),
        2
    );
    assert_eq!(
        code(&monoqt(&["sample", "--n", "5", "--sampler", "uniform", "--out", p])),
        2
    );
}

#[test]
fn quick_verify_passes() {
    let out = monoqt(&["verify", "--quick"]);
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{table}");
    assert!(!table.contains("FAIL"));
    assert!(table.contains("8 of 8 checks passed"));
}
