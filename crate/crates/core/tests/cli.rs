//! End-to-end runs of the `vrsmooth` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_vrsmooth"));
    c.env_remove("VRSMOOTH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write_affine(dir: &Path) -> PathBuf {
    let p = dir.join("affine.csv");
    let rows: String = (0..300)
        .map(|i| {
            let x = ((i * 37) % 300) as f64 / 299.0;
            format!("{x},{}\n", 2.0 + 3.0 * x)
        })
        .collect();
    std::fs::write(&p, rows).unwrap();
    p
}

#[test]
fn functionals_rows() {
    let out = stdout(&run(&["functionals", "--kernel", "epanechnikov", "--delta", "0,1"]));
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "delta,C,D,nu_tilde02,gamma_q,gamma_a");
    assert!(rows[1].starts_with("0,0,0,"));
    assert!(rows[1].ends_with(",1,1"));
    let ga: f64 = rows[2].rsplit(',').next().unwrap().parse().unwrap();
    assert!((ga - 1.22).abs() < 0.02);

    let u = stdout(&run(&["functionals", "--kernel", "uniform", "--delta", "2.5"]));
    let c: f64 = u.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(c, 0.75);
}

#[test]
fn usage_errors_exit_2() {
    let o = run(&["functionals", "--kernel", "triweight"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("triweight"));
    assert_eq!(run(&["coverage-table", "--beta", "0.95,1.0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["fit", "--data", "/nonexistent.csv", "--h", "0.1"]).status.code(), Some(2));
}

#[test]
fn q_without_shift_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_affine(dir.path());
    let d = data.to_str().unwrap();
    assert_eq!(run(&["fit", "--data", d, "--h", "0.1", "--variant", "q"]).status.code(), Some(2));
    assert_eq!(run(&["fit", "--data", d, "--h", "0.1", "--variant", "plus", "--r", "0.3"]).status.code(), Some(2));
    stdout(&run(&["fit", "--data", d, "--h", "0.1", "--variant", "q", "--r", "-0.4"]));
}

#[test]
fn fit_reproduces_affine_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_affine(dir.path());
    for variant in ["ll", "plus", "minus", "avg"] {
        let out = stdout(&run(&[
            "fit", "--data", data.to_str().unwrap(), "--h", "0.08", "--variant", variant, "--delta", "1.2",
        ]));
        for line in out.lines().skip(1) {
            let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert!((f[1] - (2.0 + 3.0 * f[0])).abs() < 1e-8, "{variant}: {line}");
        }
    }
}

#[test]
fn fit_zero_delta_matches_plain_fit() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_affine(dir.path());
    let d = data.to_str().unwrap();
    let a = stdout(&run(&["fit", "--data", d, "--h", "0.1", "--variant", "ll", "--delta", "0"]));
    let b = stdout(&run(&["fit", "--data", d, "--h", "0.1", "--variant", "avg", "--delta", "0"]));
    assert_eq!(a, b);
}

#[test]
fn fit_marks_singular_points() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sparse.csv");
    std::fs::write(&p, "0.1,1\n0.12,2\n0.5,1\n0.52,3\n0.9,0\n0.91,1\n").unwrap();
    let o = run(&["fit", "--data", p.to_str().unwrap(), "--h", "0.03", "--variant", "ll", "--grid-size", "11", "--beta", "0.9"]);
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().ends_with(",lower_cb"));
    assert!(out.contains("NA"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let ridged = stdout(&run(&["fit", "--data", p.to_str().unwrap(), "--h", "0.03", "--ridge", "--variant", "ll", "--grid-size", "11"]));
    assert!(ridged.lines().filter(|l| l.contains("NA")).count() <= out.lines().filter(|l| l.contains(",NA,NA")).count());
}

#[test]
fn fit_rejects_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "0.1,1\n0.2;2\n").unwrap();
    let o = run(&["fit", "--data", p.to_str().unwrap(), "--h", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn fit_auto_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_affine(dir.path());
    let out = stdout(&run(&[
        "fit", "--data", data.to_str().unwrap(), "--h", "auto", "--oracle", "sine", "--noise-level", "1", "--grid-size", "5",
    ]));
    assert_eq!(out.lines().count(), 6);
    assert_eq!(run(&["fit", "--data", data.to_str().unwrap(), "--h", "auto"]).status.code(), Some(2));
}

#[test]
fn simulate_minimal_config() {
    let cfg = configs().join("minimal.json");
    let out = stdout(&run(&["simulate", "--config", cfg.to_str().unwrap()]));
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        let (mise, isb, iv): (f64, f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap(), f[5].parse().unwrap());
        assert!((mise - isb - iv).abs() < 1e-10);
    }
}

#[test]
fn shipped_configs_validate() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        vrsmooth::cli::load_sim_config(&p, None, None).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn simulate_lists_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        r#"{"scenario": {"regression": "sine", "noise_level": 1, "colour": 1}, "n": 50, "reps": 3,
            "estimators": [{"variant": "ll", "width": 2}]}"#,
    )
    .unwrap();
    let o = run(&["simulate", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for key in ["reps", "scenario.colour", "estimators[0].width"] {
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn seed_precedence() {
    let cfg = configs().join("minimal.json");
    let c = cfg.to_str().unwrap();
    let base = stdout(&run(&["simulate", "--config", c]));
    let env = stdout(&bin().args(["simulate", "--config", c]).env("VRSMOOTH_SEED", "77").output().unwrap());
    let flag = stdout(&run(&["simulate", "--config", c, "--seed", "77"]));
    let both = stdout(&bin().args(["simulate", "--config", c, "--seed", "77"]).env("VRSMOOTH_SEED", "5").output().unwrap());
    assert_ne!(base, env);
    assert_eq!(env, flag);
    assert_eq!(flag, both);
}

#[test]
fn out_writes_file_manifest_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("study.csv");
    let report = dir.path().join("study.json");
    let cfg = configs().join("minimal.json");
    let o = bin()
        .args(["--threads", "2", "--out", out.to_str().unwrap(), "simulate", "--config", cfg.to_str().unwrap()])
        .args(["--report", report.to_str().unwrap()])
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv, stdout(&run(&["simulate", "--config", cfg.to_str().unwrap()])));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("study.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["timestamp"], 1_700_000_000u64);
    assert_eq!(manifest["config"]["n"], 50);

    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = configs().join("minimal.json");
    let c = cfg.to_str().unwrap();
    let one = stdout(&run(&["--threads", "1", "simulate", "--config", c, "--seed", "4"]));
    let four = stdout(&run(&["--threads", "4", "simulate", "--config", c, "--seed", "4"]));
    assert_eq!(one, four);
}
