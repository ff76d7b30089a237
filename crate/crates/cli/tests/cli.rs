use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn curveop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curveop")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn torus_meridian_operator_json() {
    let out = curveop(&["operator", "--surface", "torus", "--r", "5", "--a", "1", "--slope", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["N"], 4);
    assert_eq!(doc["band"], 0);
    let diag = doc["diagonals"]["0"].as_array().unwrap();
    assert_eq!(diag.len(), 4);
    // −2cos(πm/5), m = 1..4.
    let want = [-1.6180339887498949, -0.6180339887498949, 0.6180339887498947, 1.6180339887498947];
    for (entry, w) in diag.iter().zip(want) {
        assert!((entry[0].as_f64().unwrap() - w).abs() < 1e-15);
        assert_eq!(entry[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn empty_sphere_basis_is_a_usage_error() {
    let out = curveop(&["operator", "--surface", "sphere4", "--r", "5", "--colors", "1,1,1,2", "--curve", "eta"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty basis"));
}

#[test]
fn genus2_operator_uses_triple_keys() {
    let out = curveop(&["operator", "--surface", "genus2", "--r", "6", "--curve", "eta"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["N"], 35);
    let keys: Vec<&str> = doc["diagonals"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["-1,1,0", "0,0,-1", "0,0,1", "1,-1,0"]);
    assert_eq!(doc["basis"].as_array().unwrap().len(), 35);
}

#[test]
fn file_output_is_atomic_and_has_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.json");
    let p = path.to_str().unwrap();
    let args = ["operator", "--surface", "sphere4", "--r", "13", "--colors", "4,5,6,7", "--curve", "xi", "--out", p];
    assert_eq!(curveop(&args).status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    let doc = read_json(&path);
    assert_eq!(doc["manifest"], "op.json.manifest.json");
    let manifest = read_json(&dir.path().join("op.json.manifest.json"));
    assert_eq!(manifest["command"], "operator");
    assert_eq!(manifest["parameters"]["colors"], "4,5,6,7");
    assert_eq!(manifest["outputs"][0], p);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
    assert_eq!(curveop(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first, "output is byte-stable");
}

#[test]
fn products_suite_passes_at_even_level() {
    let out = curveop(&["verify", "products", "--r", "40", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,id,value,threshold,pass"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("skein_product,r=40 a=1 depth=4,") && row.ends_with(",1e-10,true"), "{row}");
}

#[test]
fn corrupted_entry_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    let args = ["operator", "--surface", "torus", "--r", "9", "--a", "3", "--slope", "2,1", "--out"];
    assert_eq!(curveop(&[&args[..], &[good.to_str().unwrap()]].concat()).status.code(), Some(0));
    let ok = curveop(&["verify", "spectra", "--input", good.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    let mut doc = read_json(&good);
    let entry = &mut doc["diagonals"]["0"][2][0];
    *entry = serde_json::json!(entry.as_f64().unwrap() + 1e-3);
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = curveop(&["verify", "spectra", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().any(|l| l.starts_with("input_spectrum") && l.ends_with("false")));
}

#[test]
fn genus2_input_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2.json");
    let args = ["operator", "--surface", "genus2", "--r", "7", "--curve", "delta", "--out", path.to_str().unwrap()];
    assert_eq!(curveop(&args).status.code(), Some(0));
    let out = curveop(&["verify", "spectra", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn unknown_suite_and_bad_flags_exit_2() {
    assert_eq!(curveop(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(curveop(&["verify", "products", "--tol-abs", "-1"]).status.code(), Some(2));
    assert_eq!(curveop(&["verify", "genus2", "--surface", "torus"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_curveop"))
        .args(["verify", "products", "--r", "11", "--a", "1"])
        .env("CURVEOP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_override_can_fail_a_suite() {
    let out = curveop(&["verify", "products", "--r", "21", "--a", "1", "--tol-abs", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn threads_env_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_curveop"))
        .args(["verify", "spectra", "--surface", "sphere4", "--r", "17", "--seed", "3"])
        .env("CURVEOP_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().count(), 1 + 15);
}

#[test]
fn smatrix_pairing_table() {
    let out = curveop(&["pairing", "smatrix", "--r", "5", "--a", "1", "--m0", "2", "--m1", "2", "--rbar-list", "3,5,7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rbar,r,N,exact,asymptotic,rel_error,area,bracket_min");
    assert_eq!(lines.len(), 4);
    let rel: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    // r̄ = 5 sits near a node of the interference cosine, so the errors are
    // small but not monotone: 0.0084, 0.053, 0.0049.
    assert!(rel.iter().all(|&e| e < 0.06), "{rel:?}");
    assert!(rel[2] < rel[0]);
    assert_eq!(stdout(&curveop(&["pairing", "smatrix", "--r", "5", "--a", "1", "--m0", "2", "--m1", "2", "--rbar-list", "3,5,7"])), text);
}

#[test]
fn sixj_one_dimensional_window() {
    let out = curveop(&["pairing", "sixj", "--r", "5", "--colors", "1,1,1,1", "--m0", "1", "--m1", "1", "--rbar-list", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "1");
    assert_eq!(row[3], "1");
    assert_eq!(row[4], "singular");
}

#[test]
fn empty_rbar_list_gives_header_only() {
    let out = curveop(&["pairing", "sixj", "--r", "5", "--colors", "1,1,1,1", "--m0", "1", "--m1", "1", "--rbar-list", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "rbar,r,N,exact,asymptotic,rel_error,area,bracket_min\n");
}
