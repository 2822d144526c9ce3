use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_digitwitness"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn golden_witness() {
    let out = run(&["witness", "--base", "2", "--ratio", "1/2", "--reproducible"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["witness"], "259915775");
    assert_eq!(v["verified"], true);
    assert_eq!(v["s_u"], "26");
    assert_eq!(v["s_fu"], "13");
    assert!(v.get("timestamp").is_none());
}

#[test]
fn timestamp_present_without_reproducible() {
    let v = json(&run(&["witness", "--base", "2", "--ratio", "1/2"]));
    assert!(v["timestamp"].is_u64());
}

#[test]
fn verify_value_and_pattern() {
    let v = json(&run(&["verify", "--base", "5", "--value", "2624", "--exponent", "2"]));
    assert_eq!(v["ratio"], "1/1");
    let p = json(&run(&["verify", "--base", "5", "--pattern", "b5:4^1 0^1 4^3"]));
    assert_eq!(p["witness"], "2624");
    assert_eq!(p["ratio"], "1/1");
}

#[test]
fn verify_needs_exactly_one_input() {
    assert_eq!(run(&["verify", "--base", "5"]).status.code(), Some(2));
    let both = run(&["verify", "--base", "5", "--value", "3", "--pattern", "b5:3^1"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn scan_csv_rows() {
    let out = run(&["scan", "--base", "2", "--max", "8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows, ["1/1,1,7", "3/2,5,1"]);
}

#[test]
fn fractional_witness_reports_route() {
    let v = json(&run(&[
        "witness", "--base", "2", "--ratio", "1/2", "--exponent", "1/4", "--reproducible",
    ]));
    assert_eq!(v["verified"], true);
    assert_eq!(v["exponent"], "1/4");
    assert_eq!(v["trace"]["route"], "frac-binomial");
}

#[test]
fn module_errors_exit_one_with_structured_error() {
    let out = run(&["witness", "--base", "1", "--ratio", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "invalid-base");
    assert!(v["error"]["message"].is_string());

    let out = run(&["witness", "--base", "2", "--ratio", "1/2", "--exponent", "3/4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "unsupported-exponent");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["witness", "--base", "2"][..],
        &["witness", "--base", "2", "--ratio", "0/3"],
        &["witness", "--base", "2", "--ratio", "1/2", "--format", "csv"],
        &["scan", "--base", "2", "--max", "8", "--format", "text"],
        &["demo", "--mode", "sideways", "--base", "2", "--alpha", "sqrt:2", "--target", "3"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn usage_error_leaves_cache_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let p = path.to_str().unwrap();
    let out = run(&["witness", "--base", "3", "--ratio", "7/", "--cache", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn reproducible_output_is_idempotent_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let p = path.to_str().unwrap();
    let args = ["witness", "--base", "3", "--ratio", "7/2", "--cache", p, "--reproducible"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    // served from cache: nothing appended
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
    let uncached = run(&["witness", "--base", "3", "--ratio", "7/2", "--reproducible"]);
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn tampered_cache_entry_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let p = path.to_str().unwrap();
    let args = ["witness", "--base", "2", "--ratio", "1/2", "--cache", p, "--reproducible"];
    let good = json(&run(&args));

    let line = fs::read_to_string(&path).unwrap();
    let mut entry: Value = serde_json::from_str(line.trim()).unwrap();
    entry["report"]["witness"] = Value::String("259915776".into());
    fs::write(&path, format!("{entry}\n")).unwrap();

    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rebuilt"], true);
    assert_eq!(v["witness"], good["witness"]);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 2);

    // the fresh line now shadows the tampered one
    let again = json(&run(&args));
    assert!(again.get("rebuilt").is_none());
    assert_eq!(again, good);
}

#[test]
fn corrupt_cache_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let p = path.to_str().unwrap();
    run(&["witness", "--base", "2", "--ratio", "1/2", "--cache", p]);
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("{not json\n");
    fs::write(&path, &text).unwrap();

    let out = run(&["witness", "--base", "2", "--ratio", "1/2", "--cache", p]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "cache-corruption");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 2"));
    assert_eq!(fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn empty_cache_file_behaves_as_absent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    fs::write(&path, "").unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["witness", "--base", "2", "--ratio", "1/2", "--cache", p, "--reproducible"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["witness"], "259915775");
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn bounds_calibrate_and_demo() {
    let v = json(&run(&["bounds", "--max", "1000"]));
    assert_eq!(v["log_base"], "2");
    assert_eq!(v["violations_left_eq1"].as_array().unwrap().len(), 0);

    let v = json(&run(&["calibrate", "--base", "2", "--m", "1"]));
    assert_eq!(v["d"], 4);

    let v = json(&run(&[
        "demo", "--mode", "liminf", "--base", "3", "--alpha", "inv-sqrt:2", "--target", "4",
    ]));
    assert_eq!(v["bound_holds"], true);
    assert_eq!(v["k"], 15);
}

#[test]
fn precision_cap_from_environment() {
    let out = bin()
        .args(["demo", "--mode", "limsup", "--base", "2", "--alpha", "sqrt:2", "--target", "3"])
        .env("DIGITWITNESS_MAX_PRECISION", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
