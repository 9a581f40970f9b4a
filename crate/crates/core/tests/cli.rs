use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn scenario(name: &str) -> String {
    scenarios().join(name).display().to_string()
}

fn freedil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freedil")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn entry<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == name)
        .unwrap_or_else(|| panic!("no entry {name}"))
}

#[test]
fn single_suite_passes_and_hashes_inputs() {
    let path = scenario("single_half.json");
    let out = freedil(&["suite", "--input", &path]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["artifact"], "freedil");
    assert_eq!(rep["version"], env!("CARGO_PKG_VERSION"));
    assert!(rep["timing"]["total_ms"].is_number());
    let expected = hex::encode(Sha256::digest(std::fs::read(&path).unwrap()));
    assert_eq!(rep["inputs"][0]["sha256"], expected.as_str());
    for e in rep["entries"].as_array().unwrap() {
        if let Some(r) = e["residual"].as_f64() {
            if e["name"] != "faithful_on_span" {
                assert!(r <= 1e-12, "{e}");
            }
        }
    }
}

#[test]
fn referenced_files_are_hashed() {
    let rep = json(&freedil(&["suite", "--input", &scenario("tensor.json"), "--no-timing"]));
    let paths: Vec<&str> = rep["inputs"].as_array().unwrap().iter().map(|d| d["path"].as_str().unwrap()).collect();
    assert_eq!(paths.len(), 3, "each file once: {paths:?}");
    assert!(paths.iter().any(|p| p.ends_with("shift.json")));
    assert!(paths.iter().any(|p| p.ends_with("mixed_state.json")));
    assert!(rep.get("timing").is_none());
}

#[test]
fn dilate_commands_force_their_mode() {
    let out = freedil(&["dilate-free", "--input", &scenario("single_half.json"), "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mode"], "free");

    let out = freedil(&["dilate", "--input", &scenario("free_haar.json")]);
    assert_eq!(out.status.code(), Some(3), "two factors cannot run in single mode");
    let rep = json(&out);
    assert_eq!(rep["entries"][0]["name"], "ingestion");
    assert!(rep["entries"][0]["message"].as_str().unwrap().contains("exactly one factor"));

    let out = freedil(&["dilate-doubly", "--input", &scenario("doubly.json"), "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["scenario"]["degree"], 1);
}

#[test]
fn ingestion_failures_exit_3_with_one_entry() {
    let out = freedil(&["suite", "--input", &scenario("bad_state.json")]);
    assert_eq!(out.status.code(), Some(3));
    let rep = json(&out);
    assert_eq!(rep["pass"], false);
    let entries = rep["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["name"], "ingestion");
    let msg = entries[0]["message"].as_str().unwrap();
    assert!(msg.contains("norm 0.5"), "{msg}");
    assert!(msg.contains(":5 "), "line number in {msg}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"factors\": [{\"matrix\": \"m.json\", \"state\": {\"kind\": \"vector\", \"dim\": 1, \"data\": [[1, 0]]}}]}").unwrap();
    std::fs::write(dir.path().join("m.json"), "{\"rows\": 1, \"cols\": 1, \"data\": [[[0.5]]]}").unwrap();
    let out = freedil(&["suite", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let rep = json(&out);
    assert_eq!(rep["entries"].as_array().unwrap().len(), 1);
    assert!(rep["entries"][0]["message"].as_str().unwrap().contains("m.json"));

    let out = freedil(&["suite", "--input", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(freedil(&["check", "--property", "bogus"]).status.code(), Some(2));
    assert_eq!(freedil(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_without_timing() {
    for name in ["free_mixed.json", "tensor.json"] {
        let args = ["suite", "--input", &scenario(name), "--no-timing", "--seed", "9"];
        let a = freedil(&args);
        let b = freedil(&args);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn text_format_has_overall_line() {
    let out = freedil(&["suite", "--input", &scenario("doubly.json"), "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: pass"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("word_dilation")));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = freedil(&["suite", "--input", &scenario("single_half.json"), "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(rep["pass"], true);
}

/// Runs a failing check and re-evaluates its witness with `moments`.
fn check_then_reproduce(scenario_name: &str, property: &str, family: &str, key: &str) {
    let path = scenario(scenario_name);
    let out = freedil(&["check", "--input", &path, "--property", property, "--family", family, "--no-timing"]);
    assert_eq!(out.status.code(), Some(1), "{property} on {scenario_name} should fail");
    let rep = json(&out);
    let e = &rep["entries"][0];
    let residual = e["residual"].as_f64().unwrap();
    let witness = e["witness"].as_str().unwrap();
    let again = json(&freedil(&["moments", "--input", &path, "--family", family, "--expr", witness]));
    let value = again[key].as_f64().unwrap();
    assert!(
        (value - residual).abs() <= 1e-9 * residual.max(1.0),
        "{property}: report {residual}, moments {value} for {witness}"
    );
}

#[test]
fn failing_witnesses_reproduce_through_moments() {
    check_then_reproduce("free_mixed.json", "trace", "input", "cyclic_residual");
    check_then_reproduce("tensor.json", "free", "input", "abs");
    check_then_reproduce("free_mixed.json", "tensor", "dilated", "frobenius_norm");
    check_then_reproduce("doubly.json", "tensor", "input", "factorization_residual");
}

#[test]
fn faithful_check_reports_rank_gap() {
    let out = freedil(&["check", "--input", &scenario("free_mixed.json"), "--property", "faithful", "--family", "input"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = json(&out);
    let e = &rep["entries"][0];
    assert_eq!(e["residual"], 2.0);
    let witness = e["witness"].as_str().unwrap();
    let again = json(&freedil(&["moments", "--input", &scenario("free_mixed.json"), "--family", "input", "--expr", witness]));
    assert!(again["abs"].as_f64().unwrap() < 1e-9);
    assert!(again["frobenius_norm"].as_f64().unwrap() > 0.1);
}

#[test]
fn moments_evaluates_words_and_expressions() {
    let path = scenario("free_haar.json");
    let out = json(&freedil(&["moments", "--input", &path, "--expr", "{(1,0)[0 0*]}"]));
    assert_eq!(out["value"][0].as_f64().unwrap(), 1.0);
    let out = json(&freedil(&["moments", "--input", &path, "--expr", "{(1,0)[0 1]}{(1,0)[0* 1*]}"]));
    assert!(out["abs"].as_f64().unwrap() < 1e-12);
    assert!(out["oracle"].is_null());
    let out = json(&freedil(&["moments", "--input", &path, "--expr", "{(2,0)[0 1 0* 1*]}"]));
    assert!(out["oracle_residual"].as_f64().unwrap() < 1e-12);

    let out = json(&freedil(&["moments", "--input", &path, "--word", "0^2 1^1"]));
    assert_eq!(out["pass"], true);
    let out = freedil(&["moments", "--input", &path, "--word", "0^4"]);
    assert_eq!(out.status.code(), Some(4));
    let out = freedil(&["moments", "--input", &path, "--expr", "{(1,0)[0 1 0 1 0]}"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alternation"));
}

#[test]
fn suite_witness_reproduces_dilation_residual() {
    let path = scenario("doubly.json");
    let rep = json(&freedil(&["suite", "--input", &path]));
    let e = entry(&rep, "word_dilation");
    let w = e["witness"].as_str().unwrap();
    let again = json(&freedil(&["moments", "--input", &path, "--word", w]));
    assert_eq!(again["dilation_residual"], e["residual"]);
}

#[test]
fn save_writes_loadable_unitaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = freedil(&["dilate", "--input", &scenario("single_half.json"), "--save", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let u = freedil::harness::matrix_from_value(
        &serde_json::from_str(&std::fs::read_to_string(dir.path().join("U0.json")).unwrap()).unwrap(),
    )
    .unwrap();
    assert_eq!(u.shape(), (4, 4));
    assert!(u.unitarity_residual().unwrap() < 1e-12);
    assert!(dir.path().join("J.json").exists());
    assert!(dir.path().join("state.json").exists());
}

#[test]
fn combinatorics_subcommands() {
    let out = json(&freedil(&["ncpartitions", "--k", "4"]));
    assert_eq!(out["count"], 14);
    assert_eq!(out["partitions"].as_array().unwrap().len(), 14);
    assert_eq!(freedil(&["ncpartitions", "--k", "13"]).status.code(), Some(4));

    let out = json(&freedil(&["cumulants", "--moments", "[0, 1, 0, 2, 0, 5]"]));
    let k: Vec<f64> = out["cumulants"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    for (i, x) in k.iter().enumerate() {
        let expect = if i == 1 { 1.0 } else { 0.0 };
        assert!((x - expect).abs() < 1e-12, "{k:?}");
    }
    let out = json(&freedil(&["cumulants", "--inverse", "--moments", "[[0, 0], [1, 0], [0, 0], [0, 0]]"]));
    assert_eq!(out["moments"][3][0], 2.0);
}

#[test]
fn oracle_subcommand() {
    let out = json(&freedil(&["oracle", "--input", &scenario("free_haar.json"), "--word", "0 1 1* 0*"]));
    assert_eq!(out["value"][0], 1.0);
    // free copies of the inputs: φ(t₀ t₁) = φ(t₀) φ(t₁) = 0.384 (0.3 + 0.4i)
    let out = json(&freedil(&["oracle", "--input", &scenario("free_mixed.json"), "--word", "0 1", "--family", "input"]));
    let (re, im) = (out["value"][0].as_f64().unwrap(), out["value"][1].as_f64().unwrap());
    assert!((re - 0.1152).abs() < 1e-12 && (im - 0.1536).abs() < 1e-12, "{re} {im}");
}
