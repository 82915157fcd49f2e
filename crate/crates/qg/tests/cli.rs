//! End-to-end runs of the `qgcli` binary: output shape, exit codes and determinism.

use std::process::{Command, Output};

fn qgcli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgcli")).args(args).env_remove("QG_THREADS").output().expect("qgcli runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn table1_default_is_csv_with_25_passing_rows() {
    let o = qgcli(&["--cmd", "table1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# cmd=table1 seed=20160419 pass=true"));
    assert_eq!(lines.next(), Some("t,n,I,expected,rel_err,tol"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 25);
    for r in &rows {
        assert!(r[4] < 2e-3 && r[4] < r[5], "{r:?}");
    }
}

#[test]
fn table1_single_cell() {
    let o = qgcli(&["--cmd", "table1", "--t", "2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0][0], rows[0][1]), (2.0, 3.0));
    assert!((rows[0][2] - 3.0).abs() < 1e-6);
}

#[test]
fn coarse_quadrature_with_tight_tolerance_fails() {
    let o = qgcli(&["--cmd", "table1", "--tol", "1e-9", "--quad-degree", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("qgcli: table1: FAIL") && err.contains("rel_err"), "{err}");
    assert!(stdout(&o).starts_with("# cmd=table1 seed=20160419 pass=false"));
}

#[test]
fn sw_props_json_report_passes() {
    let o = qgcli(&["--cmd", "sw_props", "--j", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cmd"], "sw_props");
    assert_eq!(v["seed"].as_u64(), Some(20160419));
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for ch in checks {
        assert_eq!(ch["pass"], true, "{ch}");
        assert!(ch["upper"].is_number(), "{ch}");
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for args in [&["--cmd", "resolution_u1"][..], &["--cmd", "kn_props", "--seed", "11"][..]] {
        let a = qgcli(args);
        let b = qgcli(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("qgcli-theta-{}.json", std::process::id()));
    let o = qgcli(&["--cmd", "theta", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["cmd"], "theta");
}

#[test]
fn invalid_arguments_exit_2() {
    for args in [
        &["--cmd", "bogus"][..],
        &["--cmd", "table1", "--format", "xml"][..],
        &["--cmd", "table1", "--tol", "0"][..],
        &["--cmd", "table1", "--tol=-1"][..],
        &["--cmd", "table1", "--t", "abc"][..],
        &["--cmd", "table1", "--out", "/nonexistent-dir/x.csv"][..],
        &[][..],
    ] {
        assert_eq!(qgcli(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_thread_count_exits_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_qgcli")).args(["--cmd", "theta"]).env("QG_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
