use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossmeasure")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn certify_feasible_and_infeasible() {
    let ok = run(&["certify", "--p1", "1/2,1/2,1/2", "--p2", "1/2,1/2,1/2", "--eps2", "0"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = report(&ok);
    assert_eq!(v["command"], "certify");
    assert_eq!(v["report"]["feasible"], true);

    let bad = run(&["certify", "--p1", "3/5,1/3", "--p2", "1/2,1/3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(report(&bad)["report"]["feasible"], false);
}

#[test]
fn third_certificate_from_cli() {
    let ok = run(&["certify", "--third", "--p1", "1/3,1/4", "--p2", "1/3,1/5"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["certify", "--third", "--p1", "2/5,1/4", "--p2", "1/3,1/5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["certify", "--p1", "1/2"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "--p1", "1/2,3/2", "--p2", "1/2,1/2"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--n", "6"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn oracle_report() {
    let out = run(&["oracle", "--p1", "1/2,1/3,1/4", "--p2", "1/2,1/3,1/4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["report"]["max"], "1/4");
}

#[test]
fn audit_reports_disjoint_witness() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, "[[1]]").unwrap();
    std::fs::write(&b, "[[2]]").unwrap();
    let out = run(&["audit", "--p1", "1/2,1/2", "--p2", "1/2,1/2", "--u1", a.to_str().unwrap(), "--u2", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["report"]["cross_intersecting"], false);

    let fx = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let (c1, c2) = (format!("{fx}/ex-n4-C1.json"), format!("{fx}/ex-n4-C2.json"));
    let half = "1/2,1/2,1/2,1/2";
    let out = run(&["audit", "--p1", half, "--p2", half, "--u1", &c1, "--u2", &c2]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--seed", "7", "oracle", "--p1", "1/2,1/3,1/4,1/5", "--p2", "1/3,1/4,1/5,1/5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.ends_with(b"\n"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["--output", path.to_str().unwrap(), "examples"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "examples");
    assert_eq!(v["report"]["pass"], true);
}
