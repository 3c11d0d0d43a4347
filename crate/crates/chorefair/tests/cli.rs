use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chorefair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chorefair")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn builtin_file(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    let p = path.to_str().unwrap().to_string();
    assert_eq!(code(&chorefair(&["generate", "--builtin", name, "-o", &p])), 0);
    p
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ternary = builtin_file(dir.path(), "ternary-no-efxpo");
    let out = chorefair(&["solve", "-i", &ternary, "-a", "additive"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrong function class"));

    let cap5 = builtin_file(dir.path(), "cancelable-cap5-n2");
    let out = chorefair(&["solve", "-i", &cap5, "-a", "cancelable", "--verify", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["guarantee"], "EFX");
    assert_eq!(v["verification"]["po"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not PO"));

    let add42 = dir.path().join("add42.json");
    let add42 = add42.to_str().unwrap();
    let gen = ["generate", "--family", "binary_additive", "-n", "3", "-m", "9", "--seed", "42", "-o", add42];
    assert_eq!(code(&chorefair(&gen)), 0);
    let alloc = dir.path().join("x.json");
    let out = chorefair(&["solve", "-i", add42, "--verify", "--json", "-o", alloc.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["guarantee"], "EFX_AND_PO");
    assert_eq!(v["verified"], true);
    let verify = chorefair(&["verify", "-i", add42, "--allocation", alloc.to_str().unwrap(), "--criteria", "efx,po"]);
    assert_eq!(code(&verify), 0);

    assert_eq!(code(&chorefair(&["solve", "-i", "/nonexistent/file.json"])), 2);
    let broken = write(dir.path(), "broken.json", "{\"n\": 1");
    assert_eq!(code(&chorefair(&["solve", "-i", &broken])), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ternary = builtin_file(dir.path(), "ternary-no-efxpo");
    let x = write(dir.path(), "x.json", r#"{"bundles":[[0,2],[1]]}"#);
    let out = chorefair(&["verify", "-i", &ternary, "--allocation", &x, "--criteria", "efx"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criteria"][0]["detail"][0], serde_json::json!({"i": 0, "j": 1, "item": 2}));
    let out = chorefair(&["verify", "-i", &ternary, "--allocation", &x, "--criteria", "po,social-cost"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criteria"][1]["detail"], 2);

    let empty = write(dir.path(), "e.json", r#"{"bundles":[[],[]]}"#);
    assert_eq!(code(&chorefair(&["verify", "-i", &ternary, "--allocation", &empty, "--criteria", "ef"])), 0);

    let cap5 = builtin_file(dir.path(), "cancelable-cap5-n2");
    let split = write(dir.path(), "s.json", r#"{"bundles":[[0,1,2,3,4],[5,6,7,8,9]]}"#);
    let out = chorefair(&["verify", "-i", &cap5, "--allocation", &split, "--criteria", "po,alpha-efx:3/2"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criteria"][0]["detail"]["bundles"][1], serde_json::json!([]));
    assert_eq!(v["criteria"][1]["pass"], true);

    let bad = write(dir.path(), "bad.json", r#"{"bundles":[[0]]}"#);
    assert_eq!(code(&chorefair(&["verify", "-i", &ternary, "--allocation", &bad])), 2);
    assert_eq!(code(&chorefair(&["verify", "-i", &ternary, "--allocation", &x, "--criteria", "envy"])), 2);
}

#[test]
fn check_class_and_enumerate() {
    let out = chorefair(&["check-class", "--builtin", "appendixA-cap5-function", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["report"]["cancelable"], true);
    assert_eq!(v[0]["report"]["additive"], false);

    let out = chorefair(&["enumerate", "--builtin", "ternary-no-efxpo", "--report", "efx-po"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["exists"], false);

    let out = chorefair(&["enumerate", "--builtin", "cancelable-cap5-n2", "--report", "efx", "--jobs", "3"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["efx_count"], 252);

    let out = chorefair(&["enumerate", "--builtin", "ternary-no-efxpo", "--search"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["efx_exists"], true);
}

#[test]
fn generate_is_deterministic_and_bench_reports() {
    let args = ["generate", "--family", "partition_matroid", "-n", "3", "-m", "8", "--seed", "5"];
    let a = chorefair(&args);
    let b = chorefair(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let out = chorefair(&["bench", "--sizes", "2x4..3x8", "--m-step", "4", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(code(&chorefair(&["bench", "--sizes", "2x4..1x8"])), 2);
}
