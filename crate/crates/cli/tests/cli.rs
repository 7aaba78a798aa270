use std::path::PathBuf;
use std::process::{Command, Output};

use feynkit_core::integrand::sunrise_catalog;
use feynkit_core::{graph, FeynmanGraph, MPoly, MandelstamDictionary, ProjForm};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn feynkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_feynkit")).args(args).env_remove("FEYNKIT_PREC").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out.stdout))
}

fn f(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn symanzik_of_the_sunrise_file() {
    let out = feynkit(&["symanzik", fixture("sunrise.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["psi"], "a1*a2 + a1*a3 + a2*a3");
    let (_, xi) = graph::symanzik_pair(&FeynmanGraph::sunrise(), &MandelstamDictionary::sunrise()).unwrap();
    assert_eq!(MPoly::parse(xi.vars(), v["xi"].as_str().unwrap()).unwrap(), xi);
}

#[test]
fn missing_file_is_an_input_error() {
    let out = feynkit(&["symanzik", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].as_str().unwrap().contains("missing.json"));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flags_are_rejected() {
    let out = feynkit(&["symanzik", fixture("sunrise.json").to_str().unwrap(), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["kind"], "input");
}

#[test]
fn bad_precision_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_feynkit"))
        .args(["sv-matrix", "--tau", "i"])
        .env("FEYNKIT_PREC", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_feynkit"))
        .args(["sv-matrix", "--tau", "i"])
        .env("FEYNKIT_PREC", "256")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(json(&ok)["matrix"][1][0]["re"].as_str().unwrap().len() > 60);
}

#[test]
fn integrand_round_trips() {
    let out = feynkit(&["integrand", "--form", "mu1"]);
    assert_eq!(out.status.code(), Some(0));
    let back = ProjForm::from_json(&json(&out)).unwrap();
    assert_eq!(back, sunrise_catalog()["mu1"]);
    let out = feynkit(&["integrand", fixture("sunrise.json").to_str().unwrap(), "--dim", "2"]);
    assert_eq!(ProjForm::from_json(&json(&out)).unwrap(), sunrise_catalog()["omega_G"]);
}

#[test]
fn subdivide_reports_the_pullback() {
    let out = feynkit(&["subdivide", fixture("sunrise.json").to_str().unwrap(), "--counts", "1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["lemma_substitution"], serde_json::json!([true, true, true]));
    assert_eq!(ProjForm::from_json(&v["pullback"]).unwrap(), sunrise_catalog()["eta_G"]);
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn coaction_is_deterministic() {
    let kin = fixture("kin_1235.json");
    let args = ["coaction", "--kin", kin.to_str().unwrap(), "--basis", "mu"];
    let a = feynkit(&args);
    let b = feynkit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let logs: Vec<&str> = v["table"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|r| r["log_argument"].as_str())
        .collect();
    assert_eq!(logs, ["3/2", "1/3", "2"]);
    assert_eq!(feynkit(&["coaction", "--kin", fixture("kin_1235.json").to_str().unwrap(), "--basis", "xy"]).status.code(), Some(2));
}

#[test]
fn verify_appendix_reports_every_component() {
    let out = feynkit(&["verify-appendix", "--samples", "2", "--seed", "7"]);
    let v = json(&out);
    assert_eq!(v["samples"], 2);
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    let all = v["all_match"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if all { 0 } else { 1 }));
    let again = feynkit(&["verify-appendix", "--samples", "2", "--seed", "7"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn sv_matrix_at_i() {
    let out = feynkit(&["sv-matrix", "--tau", "i"]);
    let v = json(&out);
    assert!((f(&v["matrix"][1][0]["re"]) + 4.0 * std::f64::consts::PI).abs() < 1e-12);
    let out = feynkit(&["sv-matrix", "--curve", "-1,0"]);
    assert!(f(&json(&out)["max_difference"]) < 1e-20);
    assert_eq!(feynkit(&["sv-matrix", "--tau", "1-2i"]).status.code(), Some(2));
}

#[test]
fn periods_of_the_sunrise_curve() {
    let out = feynkit(&["periods", "--kin", fixture("kin_1235.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(f(&v["periods"]["legendre_residual"]) < 1e-20);
    assert!(f(&v["fricke_residual"]) < 1e-10);
    assert_eq!(v["boundary_images"].as_array().unwrap().len(), 6);
}

#[test]
fn quadrature_of_a_motivic_log() {
    let out = feynkit(&["quadrature", "--form", "mu3", "--kin", fixture("kin_1235.json").to_str().unwrap(), "--tol", "1e-7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-6);
    assert!(v["error"].as_f64().unwrap() <= 1e-7);
    let out = feynkit(&["quadrature", "--form", "omega0", "--kin", fixture("kin_1235.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eichler_from_file_matches_the_builtin_form() {
    let file = feynkit(&["eichler", "--qexp", fixture("delta.json").to_str().unwrap(), "--tau", "0.5+1i", "--j", "3"]);
    let builtin = feynkit(&["eichler", "--delta", "10", "--tau", "0.5+1i", "--j", "3"]);
    assert_eq!(file.status.code(), Some(0));
    assert_eq!(json(&file)["result"], json(&builtin)["result"]);
    assert_eq!(feynkit(&["eichler", "--delta", "10", "--tau", "0.5+1i", "--j", "11"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sv.json");
    let out = feynkit(&["sv-matrix", "--tau", "0.1+1.3i", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["matrix"].is_array());
}

#[test]
fn selftest_subset() {
    let out = feynkit(&["selftest", "--only", "1,10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], 2);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
}
