//! End-to-end runs of the `robin` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use robin_cli::io::{read_json, read_results, results_to_csv};
use robin_cli::CliError;
use robin_core::asympt::{CrossingReport, FitReport};
use robin_core::geominequal::GeomCheckReport;
use robin_core::radial::ball_negative_spectrum;
use robin_core::DomainSpec;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn robin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robin")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = robin(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn ball_grid_row_count() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ball.csv");
    run_ok(&["eig", "--domain", s(&fixture("ball.json")), "--alpha-grid", "10:160:9:geom", "--count", "3", "--method", "radial", "--out", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("domain_id,alpha,j,E,method,err_est"));
    assert_eq!(lines.count(), 27);
}

#[test]
fn fem_disk_matches_radial() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", r#"{"kind":"star2d","cos":[1.0],"sin":[]}"#);
    let out = dir.path().join("fem.csv");
    run_ok(&["eig", "--domain", s(&disk), "--alpha-grid", "10:10:1", "--method", "fem", "--mesh-preset", "fine", "--out", s(&out)]);
    let rows = read_results(&out).unwrap();
    assert_eq!(rows.len(), 1);
    let exact = ball_negative_spectrum(2, 1.0, 10.0, 1).unwrap().levels[0].energy;
    assert!((rows[0].energy - exact).abs() < 1e-4, "{} vs {exact}", rows[0].energy);
}

#[test]
fn eig_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        run_ok(&["eig", "--domain", s(&fixture("ellipse.json")), "--alpha-grid", "2:8:3", "--count", "2", "--method", "fem", "--mesh-preset", "coarse", "--out", s(out)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.out");
    let (ball, ellipse, shell, small) = (fixture("ball.json"), fixture("ellipse.json"), fixture("shell.json"), fixture("ball_small.csv"));
    let (ball, ellipse, shell, small) = (s(&ball), s(&ellipse), s(&shell), s(&small));
    let cases: Vec<Vec<&str>> = vec![
        vec!["eig", "--domain", ball, "--alpha-grid", "1:2:2", "--method", "fem", "--out", s(&out)],
        vec!["eig", "--domain", ellipse, "--alpha-grid", "1:2:2", "--method", "radial", "--out", s(&out)],
        vec!["eig", "--domain", ball, "--alpha-grid", "2:1:2", "--method", "radial", "--out", s(&out)],
        vec!["eig", "--domain", ellipse, "--alpha-grid", "1:2:2", "--method", "fem", "--mesh-preset", "huge", "--out", s(&out)],
        vec!["eig", "--domain", "/nonexistent.json", "--alpha-grid", "1:2:2", "--method", "radial", "--out", s(&out)],
        vec!["geom", "--domain", shell, "--checks", "hmax-bound", "--out", s(&out)],
        vec!["perturb", "--domain", ball, "--eps", "0.01", "--out", s(&out)],
        vec!["plot", "--in", small, "--kind", "histogram", "--out", s(&out)],
        vec!["fit", "--in", small, "--mode", "exponent", "--out", s(&out)],
        vec!["eig", "--bogus-flag"],
    ];
    for args in cases {
        assert_eq!(robin(&args).status.code(), Some(2), "{args:?}");
    }
    let circle = write(&dir, "circle.json", r#"{"kind":"star2d","cos":[1.0],"sin":[]}"#);
    assert_eq!(robin(&["perturb", "--domain", s(&circle), "--eps", "0.01", "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn solver_failures_map_to_3() {
    assert_eq!(CliError::NonConvergence("x".into()).exit_code(), 3);
    assert_eq!(CliError::from(robin_core::Error::NoConvergence("x".into())).exit_code(), 3);
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
}

#[test]
fn csv_round_trip() {
    let rows = read_results(&fixture("ball_small.csv")).unwrap();
    assert_eq!(results_to_csv(&rows).unwrap(), fs::read_to_string(fixture("ball_small.csv")).unwrap());
}

#[test]
fn json_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let geom = dir.path().join("geom.json");
    run_ok(&["geom", "--domain", s(&fixture("ellipse.json")), "--out", s(&geom)]);
    let reports: Vec<GeomCheckReport> = read_json(&geom).unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.pass && r.quadrature_n == 512));
    assert_eq!(serde_json::to_string_pretty(&reports).unwrap() + "\n", fs::read_to_string(&geom).unwrap());

    let fit = dir.path().join("fit.json");
    run_ok(&["fit", "--in", s(&fixture("ball_small.csv")), "--j", "1", "--mode", "coeff", "--geometry", s(&fixture("ball.json")), "--out", s(&fit)]);
    let report: FitReport = read_json(&fit).unwrap();
    assert_eq!(report.verdict, "consistent");
    assert!((report.c_hat - 2.0).abs() < 0.05);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", fs::read_to_string(&fit).unwrap());

    let perturbed = dir.path().join("perturbed.json");
    run_ok(&["perturb", "--domain", s(&fixture("ellipse.json")), "--eps", "0.01", "--iters", "2", "--out", s(&perturbed)]);
    let spec: DomainSpec = read_json(&perturbed).unwrap();
    assert!(spec.validate().is_ok());
    run_ok(&["geom", "--domain", s(&perturbed), "--checks", "hmax-bound", "--out", s(&geom)]);
}

#[test]
fn compare_reports_crossing() {
    let dir = TempDir::new().unwrap();
    let shell = write(&dir, "shell.json", r#"{"kind":"shell","dim":3,"inner":1.0,"outer":1.2599210498948732}"#);
    let (a, b, out) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("cmp.json"));
    run_ok(&["eig", "--domain", s(&fixture("ball.json")), "--alpha-grid", "10:160:9:geom", "--method", "radial", "--out", s(&a)]);
    run_ok(&["eig", "--domain", s(&shell), "--alpha-grid", "10:160:9:geom", "--method", "radial", "--out", s(&b)]);
    run_ok(&["compare", "--a", s(&a), "--b", s(&b), "--j", "1", "--out", s(&out)]);
    let rep: CrossingReport = read_json(&out).unwrap();
    assert_eq!(rep.predicted_sign, Some(-1));
    assert_eq!(*rep.signs.last().unwrap(), -1);
    assert!(rep.alpha0.is_some());
}

#[test]
fn plots_match_golden_files() {
    let dir = TempDir::new().unwrap();
    for (input, kind, name) in [
        ("ball_small.csv", "eig-curve", "eig_curve.svg"),
        ("ball_small.csv", "c-curve", "c_curve.svg"),
        ("ellipse.json", "geometry", "geometry.svg"),
    ] {
        let out = dir.path().join(name);
        run_ok(&["plot", "--in", s(&fixture(input)), "--kind", kind, "--out", s(&out)]);
        let got = fs::read_to_string(&out).unwrap();
        assert_eq!(got, fs::read_to_string(golden(name)).unwrap(), "{name} differs from golden");
        assert!(!got.contains("href"), "{name} references external assets");
    }
}
