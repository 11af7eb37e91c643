use std::f64::consts::PI;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperzero")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Column `col` of a CSV body, header skipped.
fn column(out: &Output, col: usize) -> Vec<f64> {
    stdout(out).lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn oracle_chebyshev() {
    let out = run(&["oracle", "--family", "2F1", "--params", "a=-4,b=4,c=0.5", "--interval", "0,1"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("index,x\n"));
    let got = column(&out, 1);
    assert_eq!(got.len(), 4);
    for (k, g) in (1..=4).zip(got) {
        let w = ((2 * k - 1) as f64 * PI / 16.0).sin().powi(2);
        assert!((g - w).abs() < 1e-12);
    }
}

#[test]
fn oracle_sine_and_laguerre() {
    let out = run(&["oracle", "--family", "0F1", "--params", "c=1.5", "--arg-negated", "--interval", "0,30"]);
    let got = column(&out, 1);
    assert_eq!(got.len(), 3);
    for (k, g) in (1..=3).zip(got) {
        let w = (k as f64 * PI / 2.0).powi(2);
        assert!((g - w).abs() < 1e-12 * w);
    }
    let out = run(&["oracle", "--family", "1F1", "--params", "a=-2,c=1", "--interval", "0,10"]);
    let got = column(&out, 1);
    assert!((got[0] - (2.0 - 2f64.sqrt())).abs() < 1e-13);
    assert!((got[1] - (2.0 + 2f64.sqrt())).abs() < 1e-13);
}

#[test]
fn find_bessel_matches_oracle() {
    let common = ["--family", "0F1", "--params", "c=11", "--arg-negated", "--interval", "0,400"];
    let found = run(&[&["find"][..], &common].concat());
    assert!(found.status.success());
    assert!(stdout(&found).starts_with("index,x,z,iterations,residual,dde\n"));
    let oracle = run(&[&["oracle"][..], &common].concat());
    let (f, o) = (column(&found, 1), column(&oracle, 1));
    assert!(!f.is_empty());
    assert_eq!(f.len(), o.len());
    for (a, b) in f.iter().zip(&o) {
        assert!((a - b).abs() <= 1e-10 * b.abs());
    }
}

#[test]
fn find_fifty_zeros() {
    let out = run(&["find", "--family", "1F1", "--params", "a=-50,c=1", "--interval", "0,250"]);
    assert!(out.status.success());
    assert_eq!(column(&out, 1).len(), 50);
    let out = run(&["find", "--family", "2F1", "--params", "a=-50,b=54,c=2.5", "--interval", "0,1"]);
    assert!(out.status.success());
    let x = column(&out, 1);
    assert_eq!(x.len(), 50);
    assert!(x.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn compare_ratio_large_for_first_zero() {
    let out = run(&[
        "compare", "--family", "1F1", "--params", "a=-50,c=1", "--dde", "1,0", "--dde", "0,-1", "--interval", "0,250",
        "--max-iter", "100000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("zero_index,x,iters_dde1,iters_dde2,ratio\n"));
    assert_eq!(text.lines().count(), 51);
    assert!(column(&out, 4)[0] > 1.0);
}

#[test]
fn compare_needs_two_ddes() {
    let out = run(&["compare", "--family", "1F1", "--params", "a=-50,c=1", "--dde", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_mirrors_csv() {
    let out = run(&["find", "--family", "1F1", "--params", "a=-2,c=1", "--interval", "0,10", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for key in ["index", "x", "z", "iterations", "residual", "dde"] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn deterministic_output() {
    let args = ["find", "--family", "2F1", "--params", "a=-50,b=54,c=2.5", "--interval", "0,1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    // unknown parameter, bad interval, missing family
    assert_eq!(run(&["find", "--family", "1F1", "--params", "a=1,b=1"]).status.code(), Some(2));
    assert_eq!(run(&["find", "--family", "1F1", "--params", "a=-2,c=1", "--interval", "3,1"]).status.code(), Some(2));
    assert_eq!(run(&["find", "--params", "c=1"]).status.code(), Some(2));
    let out = run(&["find", "--family", "1F1", "--params", "a=-50,c=1", "--interval", "0,250", "--max-iter", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["find", "--family", "2F1", "--params", "a=1,b=2,c=3", "--interval", "2,3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn no_zeros_is_success() {
    let out = run(&["find", "--family", "1F1", "--params", "a=1,c=1", "--interval", "0,10"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "index,x,z,iterations,residual,dde\n");
}
