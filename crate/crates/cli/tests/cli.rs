use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nvprobe::exclusion::{exclusion_bound, ThresholdSpec};
use nvprobe::{default_config, PhysicalConstants};

fn nvprobe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvprobe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn spectrum_writes_csv_plot_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = nvprobe(&["spectrum", "--g", "0.5", "--center", "minus", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("delta,re_bracket,im_bracket,absorption\n"));
    assert_eq!(csv.lines().count(), 1002);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("at delta = -2e6"), "{stdout}");

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "spectrum");
    for name in manifest["outputs"].as_array().unwrap() {
        assert!(out.join(name.as_str().unwrap()).exists(), "{name}");
    }
    let listed: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for f in ["spectrum.csv", "spectrum.svg", "config.snapshot.toml"] {
        assert!(listed.contains(&f), "{listed:?}");
    }
}

#[test]
fn two_point_spectrum_has_no_peak_marker() {
    let dir = tempfile::tempdir().unwrap();
    let o = nvprobe(&["spectrum", "--g", "1", "--n-points", "2", "--out", path(dir.path())]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(rows(&csv).len(), 2);
    let svg = fs::read_to_string(dir.path().join("spectrum.svg")).unwrap();
    assert!(!svg.contains("<circle"));
}

#[test]
fn missing_or_bad_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    assert_eq!(nvprobe(&["heights", "--out", d]).status.code(), Some(2));
    assert_eq!(nvprobe(&["constrain", "--lambda-hi", "1", "--out", d]).status.code(), Some(2));
    assert_eq!(nvprobe(&["spectrum", "--g", "-1", "--out", d]).status.code(), Some(2));
    assert_eq!(nvprobe(&["constrain", "--g-c", "0", "--out", d]).status.code(), Some(2));
}

#[test]
fn config_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "gap = 8e-8\nradius = = 1\n").unwrap();
    let o = nvprobe(&["--config", path(&cfg), "spectrum", "--g", "1", "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("column"), "{err}");

    fs::write(&cfg, "colour = 1\n").unwrap();
    let o = nvprobe(&["--config", path(&cfg), "spectrum", "--g", "1", "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_range_matches_the_library_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = nvprobe(&[
        "constrain", "--n", "1", "--lambda-lo", "1e-7", "--lambda-hi", "1e-7", "--no-plot", "--out", path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&fs::read_to_string(dir.path().join("exclusion.csv")).unwrap());
    assert_eq!(r.len(), 1);
    let expected = exclusion_bound(1e-7, &ThresholdSpec::default(), &default_config(), &PhysicalConstants::default()).unwrap();
    assert_eq!(r[0][0], 1e-7);
    assert!((r[0][2] / expected - 1.0).abs() < 1e-15);
    assert!(!dir.path().join("exclusion.svg").exists());
}

#[test]
fn default_curve_is_monotone_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(nvprobe(&["constrain", "--out", path(out)]).status.success());
    }
    let csv_a = fs::read(a.join("exclusion.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("exclusion.csv")).unwrap());
    let r = rows(&String::from_utf8(csv_a).unwrap());
    assert_eq!(r.len(), 181);
    let finite: Vec<&Vec<f64>> = r.iter().filter(|row| row[2].is_finite()).collect();
    assert!(finite.len() > 150);
    for w in finite.windows(2) {
        assert!(w[1][0] > w[0][0]);
        assert!(w[1][2] <= w[0][2] * (1.0 + 1e-12));
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("validation.json")).unwrap()).unwrap();
    assert_eq!(report["flagged"], 0);
}

#[test]
fn overlays_are_hashed_into_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let overlay = dir.path().join("other.csv");
    fs::write(&overlay, "# lambda,alpha\n1e-8,1e-9\n1e-6,1e-12\n").unwrap();
    let out = dir.path().join("o");
    let o = nvprobe(&["constrain", "--n", "11", "--overlay", path(&overlay), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(fs::read_to_string(out.join("exclusion.svg")).unwrap().contains(">other<"));
}

#[test]
fn heights_rows_follow_the_list() {
    let dir = tempfile::tempdir().unwrap();
    let o = nvprobe(&["heights", "--g-list", "0.3,1,10", "--no-plot", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&fs::read_to_string(dir.path().join("heights.csv")).unwrap());
    assert_eq!(r.iter().map(|row| row[0]).collect::<Vec<_>>(), [0.3, 1.0, 10.0]);
    for row in &r {
        assert!(row[1] > 0.0 && row[2] < 0.0);
    }
}

#[test]
fn linear_verification_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = nvprobe(&["verify", "--suite", "linear", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["entries"].as_array().unwrap().len(), 4);
}

#[test]
fn full_quality_factor_is_refused_by_the_time_domain_suite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("q.toml");
    fs::write(&cfg, "td_quality_factor = 1e6\n").unwrap();
    let out = dir.path().join("o");
    let o = nvprobe(&["--config", path(&cfg), "verify", "--suite", "timedomain", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reduced quality factor"));
    // the report is still written
    assert!(out.join("verify.json").exists());
}
