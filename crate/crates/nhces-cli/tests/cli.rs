//! Black-box tests of the binary: config handling, exit codes, emitted file
//! shapes, and the figure data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn nhces(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhces")).args(args).output().expect("binary should spawn")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const BASE: &str = r#"{
  "preference": {"rho": 0.5, "alpha": 2.0, "xi_p": 0.3, "xi_omega": 0.1},
  "grid": {"mode": "sample", "size": 2000},
  "fig": {
    "curves": [
      {"k": 1.0, "m": 0.5, "n": 1.0},
      {"k": 1.0, "m": 2.0, "n": 1.0},
      {"k": 1.0, "m": 4.0, "n": 1.0}
    ],
    "points": 150
  },
  "seed": 9
}"#;

#[test]
fn expenditure_override_produces_one_block_per_level() {
    let dir = tmp("blocks");
    let config = write_config(&dir, BASE);
    let out_dir = dir.join("out");
    let out = nhces(&[
        "solve",
        "--config",
        &config,
        "--expenditures",
        "0.7,1.3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let demand = fs::read_to_string(out_dir.join("demand.csv")).unwrap();
    let mut levels: Vec<&str> = demand
        .lines()
        .skip(1)
        .map(|line| line.split(',').next().unwrap())
        .collect();
    levels.dedup();
    assert_eq!(levels.len(), 2, "one contiguous block per expenditure level");
    assert_eq!(demand.lines().count(), 1 + 2 * 2000);
}

#[test]
fn fig_amoroso_row_count_matches_config() {
    let dir = tmp("fig-amoroso");
    let config = write_config(&dir, BASE);
    let out_dir = dir.join("out");
    let out = nhces(&["fig", "amoroso", "--config", &config, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(out_dir.join("amoroso.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 3 * 150);
}

/// ln p = xi_p * eps + noise, so least squares on the emitted scatter
/// recovers the price loading.
#[test]
fn fig_joint_scatter_recovers_price_loading() {
    let dir = tmp("fig-joint");
    let noisy = BASE.replace(
        r#""grid": {"mode": "sample", "size": 2000},"#,
        r#""grid": {"mode": "sample", "size": 2000},
  "noise": {"variant": "independent_normal",
            "mu_p": 0.0, "sigma_p": 0.15, "mu_omega": 0.0, "sigma_omega": 0.1},"#,
    );
    let config = write_config(&dir, &noisy);
    let out_dir = dir.join("out");
    let out = nhces(&["fig", "joint", "--config", &config, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(out_dir.join("joint.csv")).unwrap();
    let points: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|line| {
            let mut cols = line.split(',');
            let x: f64 = cols.next().unwrap().parse().unwrap();
            let y: f64 = cols.next().unwrap().parse().unwrap();
            (x, y)
        })
        .collect();
    assert_eq!(points.len(), 2000);

    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (x - mx), b + (x - mx) * (y - my)));
    let slope = sxy / sxx;
    // Standard error ~ sigma_p / (sigma_eps sqrt(n)) ~ 2.4e-3.
    assert!((slope - 0.3).abs() < 0.02, "slope {slope}");
}

#[test]
fn dump_config_fills_defaults_and_is_byte_stable() {
    let dir = tmp("dump");
    let config = write_config(&dir, BASE);
    let first = nhces(&["solve", "--config", &config, "--dump-config"]);
    let second = nhces(&["solve", "--config", &config, "--dump-config"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let parsed: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(parsed["seed"], 9);
    assert_eq!(parsed["preference"]["beta"], 1.0);
    assert_eq!(parsed["noise"]["variant"], "degenerate");
    assert_eq!(parsed["expenditures"], serde_json::json!([0.5, 1.0, 2.0]));
    assert!(parsed.get("amoroso").is_none(), "absent sections stay absent");

    // No output files while dumping.
    assert!(!dir.join("out").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tmp("config-errors");
    for body in [
        "not json",
        r#"{"preference": {"rho": 1.0, "alpha": 2.0}, "grid": {"mode": "sample", "size": 10}}"#,
        r#"{"preference": {"rho": 0.5, "alpha": 2.0}, "grid": {"mode": "sample", "size": 10}, "typo": 1}"#,
        r#"{"preference": {"rho": 0.5, "alpha": 2.0}, "grid": {"mode": "sample", "size": 0}}"#,
    ] {
        let config = write_config(&dir, body);
        let out = nhces(&["verify", "--config", &config]);
        assert_eq!(out.status.code(), Some(2), "config: {body}");
        assert!(!out.stderr.is_empty());
    }

    // Section required by the subcommand but absent.
    let config = write_config(&dir, BASE);
    for missing in ["aggregate", "euler", "logit"] {
        let out = nhces(&[missing, "--config", &config]);
        assert_eq!(out.status.code(), Some(2), "{missing} without its section");
    }
}

#[test]
fn quadrature_grid_rejects_nondegenerate_noise_at_config_stage() {
    let dir = tmp("quad-noise");
    let body = r#"{
  "preference": {"rho": 0.5, "alpha": 2.0},
  "noise": {"variant": "independent_normal",
            "mu_p": 0.0, "sigma_p": 0.1, "mu_omega": 0.0, "sigma_omega": 0.1},
  "grid": {"mode": "quadrature", "size": 100}
}"#;
    let config = write_config(&dir, body);
    let out_dir = dir.join("out");
    let out = nhces(&["solve", "--config", &config, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
