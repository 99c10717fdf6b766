//! Golden tests over the command-line binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn curves() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../curves")
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfaff-census")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Drops the trailing timing column of census CSV.
fn without_timing(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map(|(a, _)| a).unwrap_or(l))
        .collect::<Vec<_>>()
        .join("\n")
}

fn curve(name: &str) -> String {
    curves().join(name).to_string_lossy().into_owned()
}

#[test]
fn params_golden() {
    let o = run(&["params", "--box", "2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("params_box_2_2.txt"));
}

#[test]
fn census_pow2_golden() {
    let o = run(&["census", "--curve", &curve("pow2.json"), "--H", "4,10,100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(without_timing(&stdout(&o)), without_timing(&golden("census_pow2.csv")));
}

#[test]
fn census_algebraic_golden() {
    let o = run(&["census", "--curve", &curve("parabola.json"), "--H", "4,10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(without_timing(&stdout(&o)), without_timing(&golden("census_parabola.csv")));
}

#[test]
fn bounds_thm14_golden() {
    let o = run(&["bounds", "--thm14", "--b", "2", "--c", "2", "--H", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("bounds_thm14.csv"));
}

#[test]
fn bounds_curve_golden() {
    let o = run(&["bounds", "--curve", &curve("pow2.json"), "--H", "4,100,1e6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("bounds_pow2.csv"));
}

#[test]
fn verify_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["verify", "--curve", &curve("pow2.json"), "--H", "4,10,100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["census.csv", "bundle.json", "plot.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(out.join("plot.csv")).unwrap(), golden("verify_pow2_plot.csv"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["census", "--curve", &curve("pow2.json"), "--H", "10,4"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--curve", "/nonexistent.json", "--H", "4"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "algebraic", "curve": {"support": [[0, 1]], "coeffs": [["x"]]}}"#).unwrap();
    let o = run(&["census", "--curve", bad.to_str().unwrap(), "--H", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("coeffs[0]"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn help_names_every_command() {
    let text = stdout(&run(&["--help"]));
    for c in ["params", "bounds", "census", "cover", "verify", "threshold"] {
        assert!(text.contains(c), "{c}");
    }
    let census = stdout(&run(&["census", "--help"]));
    for f in ["--curve", "--H", "--jobs", "--precision", "--out", "--roots"] {
        assert!(census.contains(f), "{f}");
    }
    let verify = stdout(&run(&["verify", "--help"]));
    for f in ["--box", "--total-degree", "--out"] {
        assert!(verify.contains(f), "{f}");
    }
}

#[test]
fn every_bundled_curve_loads() {
    let mut n = 0;
    for e in std::fs::read_dir(curves()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "json") {
            let s = pfaff_census::census::CurveSpec::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert_eq!(Some(s.id.as_str()), p.file_stem().and_then(|s| s.to_str()));
            n += 1;
        }
    }
    assert!(n >= 8);
}
