use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ds2(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ds2")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn kernel_scan_hits_known_values() {
    let dir = TempDir::new().unwrap();
    let o = ds2(dir.path(), &["kernel", "--lambda-min", "-0.5", "--lambda-max", "1", "--points", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert!(text.starts_with("# ds2 kernel\n"));
    assert!(text.contains("# convention=\"series_limit\""));
    let r = rows(&text);
    assert_eq!(r.len(), 4);
    assert_eq!(r[3], vec![1.0, 0.0, 0.0]);

    let o = ds2(dir.path(), &["kernel", "--alpha", "0.5", "--lambda-min", "0", "--lambda-max", "1", "--points", "2"]);
    assert!(o.status.success());
    let r = rows(&fs::read_to_string(dir.path().join("kernel.csv")).unwrap());
    assert!((r[1][1] - 0.25).abs() < 1e-14 && r[1][2] == 0.0);
}

#[test]
fn limit_reports_first_order_convergence() {
    let dir = TempDir::new().unwrap();
    let o = ds2(dir.path(), &["limit"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("limit.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    let slope = v["suites"]["massless_limit"]["data"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    assert_eq!(rows(&fs::read_to_string(dir.path().join("limit.csv")).unwrap()).len(), 3);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let o = ds2(dir.path(), &["kernel", "--lambda-min", "-1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda range"));

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "r = 1\nnot_a_key = 3\n").unwrap();
    let o = ds2(dir.path(), &["limit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not_a_key"));

    assert_eq!(ds2(dir.path(), &["krein", "--kappa", "sideways"]).status.code(), Some(2));
    assert_eq!(ds2(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn paper_kappa_fails_conservation_away_from_unit_radius() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("r2.cfg");
    fs::write(&cfg, "# radius two\nr = 2\nkappa = paper\n").unwrap();
    let o = ds2(dir.path(), &["charge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL charge/slice_charge_spread"), "{stdout}");

    let o = ds2(dir.path(), &["charge", "--config", cfg.to_str().unwrap(), "--kappa", "derived"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("charge.csv")).unwrap();
    assert!(csv.contains("tau,J_real,J_imag,spread"));
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = || {
        let o = ds2(dir.path(), &["krein", "--seed", "11"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
        (o.stdout, fs::read(dir.path().join("krein.json")).unwrap())
    };
    assert_eq!(run(), run());
}

#[test]
fn krein_suite_runs_at_half_resolution() {
    let dir = TempDir::new().unwrap();
    let o = ds2(dir.path(), &["krein", "--resolution", "half"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("krein/eta_squared_minus_identity"), "{stdout}");
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("krein.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["n_theta"], 48);
    assert_eq!(v["suites"]["positivity"]["pass"], true);
}
