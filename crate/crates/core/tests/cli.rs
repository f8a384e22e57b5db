use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nhps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhps")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    nhps(&full)
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&nhps(&["--help"])), 0);
    assert_eq!(code(&nhps(&["qsigs", "--help"])), 0);
    assert_eq!(code(&nhps(&[])), 2);
    assert_eq!(code(&nhps(&["pseudospec", "--no-such-flag"])), 2);
    assert_eq!(code(&nhps(&["pseudospec", "--boundary", "twisted"])), 2);
}

#[test]
fn pseudospec_qubit_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["pseudospec", "--model", "qubit", "--g", "1.0", "--re", "-0.2:0.2:101", "--im", "-0.2:0.2:101", "--eps", "0.002"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path());
    let r = &s["results"];
    let cell = 0.004;
    assert!((r["max_inside_radius"].as_f64().unwrap() - 0.0633).abs() <= cell);
    assert!((r["min_outside_radius"].as_f64().unwrap() - 0.0633).abs() <= cell);
    let csv = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("re,im,sigma0"));
    assert_eq!(csv.lines().count(), 1 + 101 * 101);
}

#[test]
fn pseudospec_hn_contains_ellipse() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["pseudospec", "--model", "hn", "--n", "20", "--J", "1", "--gamma", "0.8", "--eps", "0.1", "--re", "-2.4:2.4:25", "--im", "-1.8:1.8:19"]);
    assert_eq!(code(&o), 0);
    let r = summary(dir.path())["results"].clone();
    assert_eq!(r["closed_form_eigenvalues_inside"], 20);
    assert!(r["inside"].as_u64().unwrap() > 0);
}

#[test]
fn empty_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["pseudospec", "--re", "0:1:0"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["pseudospec", "--re", "garbage"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["pseudospec", "--eps", "0"])), 2);
}

#[test]
fn qsigs_verdicts() {
    for (z, verdict) in [("0.1", "OUT"), ("0", "IN"), ("0.05", "IN"), ("-0.05", "IN")] {
        let dir = tempfile::tempdir().unwrap();
        let o = run_in(dir.path(), &["qsigs", "--model", "qubit", "--g", "1", "--z-re", z, "--T", "2000", "--n-times", "25", "--shots", "2000", "--seed", "3", "--eps", "0.002"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).trim_end().ends_with(verdict), "z = {z}");
        let r = summary(dir.path())["results"].clone();
        assert_eq!(r["verdict"], verdict);
        if z.ends_with("0.05") {
            assert!((r["theta_star"].as_f64().unwrap() - 1.25e-3).abs() <= 6e-4);
        }
        for f in ["dataset.csv", "curve.csv"] {
            assert!(dir.path().join(f).exists());
        }
    }
}

#[test]
fn mix_meets_benchmark_and_flags_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["mix", "--n", "20"]);
    assert_eq!(code(&o), 0);
    let run = summary(dir.path())["results"]["runs"][0].clone();
    assert_eq!(run["converged"], true);
    assert!(run["t_sim"].as_f64().unwrap() <= 30.0);
    assert!(dir.path().join("trajectories/n20_z0.csv").exists());

    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["mix", "--n", "8", "--max-steps", "0"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let s = summary(dir.path());
    assert_eq!(s["results"]["runs"][0]["converged"], false);
    assert_eq!(s["flags"]["all_converged"], false);
}

#[test]
fn mix_sweep_reports_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["mix", "--n-sweep", "8,12,16,20,24,28,32"]);
    assert_eq!(code(&o), 0);
    let slope = summary(dir.path())["results"]["slopes"][0]["loglog_slope"].as_f64().unwrap();
    assert!(slope <= 1.1, "slope {slope}");
    let csv = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn gadgets_pass() {
    for args in [
        vec!["gadget", "cyclic", "--m", "3", "--delta", "0.125"],
        vec!["gadget", "clock", "--d", "4"],
        vec!["gadget", "clock", "--lambda-min", "0.6"],
        vec!["gadget", "hopping-clock", "--m", "4"],
    ] {
        let dir = tempfile::tempdir().unwrap();
        let o = run_in(dir.path(), &args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
        assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
        assert_eq!(summary(dir.path())["results"]["pass"], true);
    }
}

#[test]
fn gadget_failure_exits_one() {
    // A singular input makes zero a defective eigenvalue, resolved only to
    // about eps^(1/m), so the spectral check rejects it.
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["gadget", "cyclic", "--m", "4", "--lambda-min", "0"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn mix_bound_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["mix-bound"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("bound_table.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("m,eps,bound,tv_at_bound"));
}

#[test]
fn table_reproduction_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["reproduce", "table-e1", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn config_files_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"z_re": 0.1, "n_times": 10, "shots_per_time": 50, "seed": 5, "grid": {"kind": "uniform", "lo": 0, "hi": 0.01, "nodes": 1001}}"#).unwrap();
    let out = dir.path().join("a");
    let o = nhps(&["qsigs", "--config", cfg.to_str().unwrap(), "--seed", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["seed"], 6);
    assert_eq!(s["config"]["n_times"], 10);
    assert_eq!(s["config"]["z_re"], 0.1);
    assert_eq!(s["results"]["grid_nodes"], 1001);

    fs::write(&cfg, r#"{"z_re": 0.1, "typo_key": 3}"#).unwrap();
    assert_eq!(code(&nhps(&["qsigs", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
    fs::write(&cfg, r#"{"model": {"model": "hn", "n": 8, "extra": 1}}"#).unwrap();
    assert_eq!(code(&nhps(&["pseudospec", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
    assert_eq!(code(&nhps(&["qsigs", "--config", "/no/such/file.json"])), 2);
}

#[test]
fn summaries_carry_required_fields() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["mix", "--n", "8", "--reflection"])), 0);
    let s = summary(dir.path());
    for key in ["version", "command", "config", "seed", "wall_time_s", "flags", "results"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
    assert!(s["flags"]["reflection_coupling"].is_string());
}

fn strip_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["qsigs", "--z-re", "0.05", "--n-times", "10", "--shots", "100", "--seed", "42"];
    assert_eq!(code(&run_in(a.path(), &args)), 0);
    assert_eq!(code(&run_in(b.path(), &args)), 0);
    for f in ["dataset.csv", "curve.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_eq!(strip_wall_time(summary(a.path())), strip_wall_time(summary(b.path())));

    // Thread count does not change the output.
    let c = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nhps"))
        .args(args)
        .args(["--out", c.path().to_str().unwrap()])
        .env("NHPS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(a.path().join("curve.csv")).unwrap(), fs::read(c.path().join("curve.csv")).unwrap());
}
