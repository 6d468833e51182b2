use std::process::{Command, Output};

use serde_json::Value;

const POLY: &str = r#"{"N":3,"coeffs":[[2,1,0],[3,1,0]]}"#;

fn dspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn dspace_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dspace"))
        .args(args)
        .env("THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn h2_and_b2_norms() {
    let h = json(&dspace(&["norm", "--space", "h2", "--poly", POLY]));
    assert!((h["estimate"]["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(h["estimate"]["method"], "exact");
    let b = json(&dspace(&["norm", "--space", "b2", "--poly", POLY]));
    assert_eq!(b["estimate"]["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let args = [
        "norm",
        "--space",
        "hp",
        "--p",
        "3",
        "--samples",
        "1e6",
        "--seed",
        "7",
        "--poly",
        POLY,
    ];
    let a = dspace(&args);
    let b = dspace(&args);
    let c = dspace_env(&args, "4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["estimate"]["seed"], 7);
    assert_eq!(v["estimate"]["samples"], 1_000_000);
    assert_eq!(v["config"]["samples"], 1_000_000);
}

#[test]
fn a2_scan_decreases() {
    let rows = csv_rows(&dspace(&[
        "eval-scan",
        "--space",
        "a2",
        "--measure",
        "alpha:0",
        "--sigma-min",
        "0.51",
        "--sigma-max",
        "2",
        "--points",
        "50",
    ]));
    assert_eq!(rows.len(), 50);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(rows.iter().all(|r| r[2] == "exact" && r[3] == "ap-mu"));
}

#[test]
fn bp_scan_is_hp_scan_squared() {
    let args = |space: &'static str| {
        [
            "eval-scan",
            "--space",
            space,
            "--p",
            "2",
            "--sigma-min",
            "0.6",
            "--sigma-max",
            "1.5",
            "--points",
            "7",
        ]
    };
    let hp = csv_rows(&dspace(&args("hp")));
    let bp = csv_rows(&dspace(&args("bp")));
    for (h, b) in hp.iter().zip(&bp) {
        let (h, b): (f64, f64) = (h[1].parse().unwrap(), b[1].parse().unwrap());
        assert!((b - h * h).abs() <= 1e-14 * b);
    }
}

#[test]
fn configuration_errors_exit_2() {
    let out = dspace(&[
        "eval-scan",
        "--space",
        "a2",
        "--sigma-min",
        "0.5",
        "--sigma-max",
        "1",
        "--points",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        dspace(&["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dspace(&["norm", "--space", "h2", "--poly", r#"{"N":0}"#])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dspace(&["norm", "--space", "zz", "--poly", POLY])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dspace(&["eval-norm", "--space", "hp", "--sigma", "0.4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dspace_env(&["norm", "--space", "h2", "--poly", POLY], "x")
            .status
            .code(),
        Some(2)
    );
    // K below the prime support
    let out = dspace(&[
        "norm",
        "--space",
        "hp",
        "--p",
        "3",
        "--k",
        "1",
        "--samples",
        "100",
        "--poly",
        POLY,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"p": 4, "space": "hp", "seed": 3}"#).unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&dspace(&["norm", "--config", p, "--poly", POLY]));
    assert_eq!(from_file["config"]["p"], 4);
    let flagged = json(&dspace(&[
        "norm", "--config", p, "--p", "2", "--poly", POLY,
    ]));
    assert_eq!(flagged["config"]["p"], 2);
    assert!((flagged["estimate"]["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        dspace(&["norm", "--config", p, "--poly", POLY])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_norm_and_kernel() {
    let v = json(&dspace(&[
        "eval-norm",
        "--space",
        "hp",
        "--sigma",
        "1",
        "--p",
        "2",
    ]));
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    assert!((v["bound"]["value"].as_f64().unwrap() - zeta2.sqrt()).abs() < 1e-14);
    let k = json(&dspace(&[
        "kernel",
        "--measure",
        "dirac0",
        "--sigma",
        "1",
        "--n",
        "1000",
    ]));
    let re = k["kernel"]["value"][0].as_f64().unwrap();
    let tail = k["kernel"]["tail_bound"].as_f64().unwrap();
    assert!(re < zeta2 && zeta2 - re <= tail);
}

#[test]
fn verify_identities_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identities.json");
    let p = path.to_str().unwrap();
    let start = std::time::Instant::now();
    let out = dspace(&[
        "verify",
        "--suite",
        "identities",
        "--json",
        p,
        "--no-timing",
    ]);
    assert!(start.elapsed().as_secs() < 60);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let first = std::fs::read(&path).unwrap();
    let doc: Value = serde_json::from_slice(&first).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports
        .iter()
        .all(|r| r["status"] == "pass" && r["runtime_ms"] == 0));
    assert_eq!(doc["config"]["identities"]["binomial_n_max"], 40);

    let again = dspace(&[
        "verify",
        "--suite",
        "identities",
        "--format",
        "json",
        "--no-timing",
    ]);
    assert_eq!(again.stdout, first);

    let summary = dspace(&["report", "--input", p]);
    assert_eq!(summary.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&summary.stdout).contains("4/4 passed"));
}

#[test]
fn failing_report_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.json");
    // a tolerance below zero cannot be met
    std::fs::write(&cfg, r#"{"littlewood_paley": {"b2_tolerance": -1.0}}"#).unwrap();
    let saved = dir.path().join("out.json");
    let out = dspace(&[
        "verify",
        "--suite",
        "littlewood-paley",
        "--config",
        cfg.to_str().unwrap(),
        "--json",
        saved.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1/2 passed"));
    assert_eq!(
        dspace(&["report", "--input", saved.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_asymptotics_records_fits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("asymptotics.json");
    let out = dspace_env(
        &[
            "verify",
            "--suite",
            "asymptotics",
            "--json",
            path.to_str().unwrap(),
        ],
        "4",
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    let blowup: Vec<&Value> = reports
        .iter()
        .filter(|r| r["name"].as_str().unwrap().starts_with("injection_blowup"))
        .collect();
    assert_eq!(blowup.len(), 2);
    for r in blowup {
        assert!(r["parameters"]["fitted_exponent"].is_number());
        assert!(r["parameters"]["residual"].is_number());
    }
}
