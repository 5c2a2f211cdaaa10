use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlschur")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mlschur-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn schur_of_v4() {
    let r = report(&["schur", "--group", "V4"]);
    assert_eq!(r["command"], "schur");
    assert_eq!(r["invariants"]["schur"], json!([2]));
    assert_eq!(r["timing"], Value::Null);
}

#[test]
fn dihedral_structure_checks() {
    let r = report(&["mla", "check", "--group", "D4", "--star", "a*b=b"]);
    assert_eq!(r["invariants"]["pass"], json!(true));
    // [a,b] = b⁻² = b² in D4, so a⋆b = b differs from the commutator
    assert_eq!(r["invariants"]["classification"], "proper");
    let r = report(&["mla", "check", "--group", "D4", "--star", "a*b=b^2"]);
    assert_eq!(r["invariants"]["classification"], "improper");
}

#[test]
fn reports_are_deterministic() {
    let args = ["cohom", "h2ml", "--group", "V4", "--star", "a*b=a", "-m", "4", "--witness"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["schur", "--group", "Y7"]).status.code(), Some(2));
    assert_eq!(run(&["schur"]).status.code(), Some(2));
    assert_eq!(run(&["mla", "check", "--group", "V4", "--star", "a*z=a"]).status.code(), Some(2));
}

#[test]
fn inconsistent_star_exits_1() {
    let out = run(&["mla", "check", "--group", "Q2", "--star", "a*b=b"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn h2_of_v4() {
    let r = report(&["cohom", "h2", "--group", "V4", "-m", "2"]);
    assert_eq!(r["invariants"]["h2"], json!([2, 2, 2]));
}

#[test]
fn group_file_round_trip() {
    let path = scratch("d5.group");
    let p = path.to_str().unwrap();
    report(&["group", "build", "--group", "D5", "--output", p]);
    let spec = format!("file:{p}");
    let r = report(&["group", "print", "--group", &spec]);
    assert_eq!(r["invariants"]["fingerprint"]["order"], json!(10));
    assert_eq!(r["invariants"]["commutator_subgroup_order"], json!(5));
}

#[test]
fn lie_exterior_square_of_v4() {
    let r = report(&["liesq", "--group", "V4", "--star", "trivial"]);
    assert_eq!(r["invariants"]["invariants"], json!([2, 2]));
    assert_eq!(r["invariants"]["tilde_star_trivial"], json!(true));
}

#[test]
fn tilde_schur_of_q2() {
    let r = report(&["schur-ml", "--group", "Q2", "--star", "a*b=b^2", "--witness"]);
    assert_eq!(r["invariants"]["tilde_schur"], json!([2]));
    assert!(r["witnesses"]["tower_images"].is_array());
}

#[test]
fn jacobi_subgroup_of_q3() {
    let r = report(&["ext", "jsub", "--group", "Q3", "--star", "a*b=b^2"]);
    assert_eq!(r["invariants"]["j_order"], json!(1));
    assert_eq!(r["invariants"]["hom_quotient_to_cstar"], json!([3]));
}

#[test]
fn lie_simplicity_of_sl23() {
    let r = report(&["mla", "classify", "--group", "SL(2,3)"]);
    assert_eq!(r["invariants"]["lie_simple"], json!(true));
}

#[test]
fn enumerate_v4() {
    let r = report(&["mla", "enumerate", "--group", "V4"]);
    assert_eq!(r["invariants"]["trivial"], json!(1));
    assert!(r["invariants"]["structures"].as_u64().unwrap() > 1);
    assert!(r["invariants"]["automorphism_orbits"].is_u64());
}

#[test]
fn custom_manifests() {
    let good = json!([
        {"group": "Z6", "structure": "trivial",
         "expected": {"exterior": {"abelian": []}, "schur": [], "lie_simple": true, "tilde": []}},
        {"group": "Z2 x Z4", "structure": "trivial",
         "expected": {"schur": [2], "tilde": [2, 2]}}
    ]);
    let path = scratch("good.json");
    std::fs::write(&path, good.to_string()).unwrap();
    let r = report(&["verify", "table", "--manifest", path.to_str().unwrap()]);
    assert_eq!(r["invariants"]["passed"], json!(2));

    let bad = json!([{"group": "V4", "structure": "trivial", "expected": {"schur": [4]}}]);
    let path = scratch("bad.json");
    std::fs::write(&path, bad.to_string()).unwrap();
    let out = run(&["verify", "table", "--manifest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["invariants"]["rows"][0]["status"], "fail");
}

#[test]
fn timing_flag_records_seconds() {
    let r = report(&["schur", "--group", "Z6", "--timing"]);
    assert!(r["timing"].is_f64());
}
