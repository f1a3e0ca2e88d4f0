use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gradedlc"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, err) = run(&a);
    (
        code,
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}")),
    )
}

#[test]
fn reisner_h4_only_at_the_full_class() {
    let (code, v) = json(&["lc", &data("reisner.json"), "--j", "4"]);
    assert_eq!(code, 0);
    let pieces = v["results"]["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces[0]["class"], serde_json::json!([1, 2, 3, 4, 5, 6]));
    assert_eq!(pieces[0]["text"], "Z/2");
}

#[test]
fn first_cohomology_of_principal_ideals() {
    // S_{x1x2}/S: every nonempty class
    let (_, v) = json(&["lc", "builtin:x1x2", "--j", "1"]);
    assert_eq!(v["results"]["pieces"].as_array().unwrap().len(), 3);
    let f = std::env::temp_dir().join("gradedlc_x1_in_two.json");
    std::fs::write(&f, r#"{"variables": 2, "generators": [[1, 0]]}"#).unwrap();
    let (_, v) = json(&["lc", f.to_str().unwrap()]);
    let classes: Vec<&Value> = v["results"]["pieces"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| &p["class"])
        .collect();
    // x1^-1 Z[x1^-1, x2]: x2 never goes negative
    assert_eq!(classes, vec![&serde_json::json!([1])]);
}

#[test]
fn unit_ideal_is_all_zero_with_a_warning() {
    let f = std::env::temp_dir().join("gradedlc_unit.json");
    std::fs::write(&f, r#"{"variables": 2, "generators": [[0, 0]]}"#).unwrap();
    let (code, v) = json(&["lc", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["results"]["pieces"].as_array().unwrap().is_empty());
    assert_eq!(v["warnings"][0]["code"], "TRIVIAL_IDEAL");
}

#[test]
fn radical_warning_and_malformed_input() {
    let f = std::env::temp_dir().join("gradedlc_square.json");
    std::fs::write(&f, r#"{"variables": 2, "generators": [[2, 1]]}"#).unwrap();
    let (_, v) = json(&["bad-primes", f.to_str().unwrap()]);
    assert_eq!(v["warnings"][0]["code"], "RADICAL_TAKEN");
    let g = std::env::temp_dir().join("gradedlc_bad.json");
    std::fs::write(&g, r#"{"variables": 2, "generators": [[1]]}"#).unwrap();
    assert_eq!(run(&["lc", g.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["lc", "builtin:nope"]).0, 2);
    assert_eq!(run(&["lyubeznik", &data("reisner.json"), "--prime", "6"]).0, 2);
    assert_eq!(run(&["lc", &data("reisner.json"), "--max-vars", "5"]).0, 2);
}

#[test]
fn bad_primes() {
    for (f, w) in [
        ("reisner.json", vec![2]),
        ("three-points.json", vec![]),
        ("x1x2.json", vec![]),
    ] {
        let (_, v) = json(&["bad-primes", &data(f)]);
        let got: Vec<u64> = v["results"]["bad_primes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .collect();
        assert_eq!(got, w, "{f}");
    }
}

#[test]
fn lyubeznik_verdicts() {
    let (code, v) = json(&["lyubeznik", &data("reisner.json"), "--prime", "3", "--mixed"]);
    assert_eq!((code, v["results"]["verdict"].as_str()), (0, Some("agree")));
    let (code, v) = json(&["lyubeznik", &data("reisner.json"), "--prime", "2", "--mixed"]);
    assert_eq!((code, v["results"]["verdict"].as_str()), (0, Some("disagree")));
    assert!(!v["results"]["agreement"]["quotient_differences"]
        .as_array()
        .unwrap()
        .is_empty());
    let (_, v) = json(&["lyubeznik", &data("three-points.json"), "--prime", "7", "--mixed"]);
    assert_eq!(v["results"]["verdict"], "agree");
    assert_eq!(v["results"]["standard"]["entries"][1][1], 1);
}

#[test]
fn low_truncation_is_bumped() {
    let (code, v) = json(&[
        "lyubeznik",
        &data("reisner.json"),
        "--prime",
        "2",
        "--mixed",
        "--trunc",
        "1",
    ]);
    assert_eq!(code, 0);
    assert!(v["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["code"] == "TRUNC_BUMPED"));
}

#[test]
fn counterexample_claims() {
    let (code, v) = json(&["verify-counterexample"]);
    assert_eq!(code, 0);
    assert!(v["results"]["claims"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    assert!(v["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .all(|w| w["code"] == "PAPER_TEXT_DISCREPANCY"));
    let (code, v) = json(&["verify-counterexample", "--prime", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["expected_fail_mode"], true);
    assert_eq!(v["results"]["all_passed"], false);
}

#[test]
fn iterated_verdicts() {
    let (_, v) = json(&["iterated", &data("reisner.json"), "0", "4", "--prime", "5", "--at", "m"]);
    assert_eq!(v["results"]["injective"], true);
    let (_, v) = json(&["iterated", &data("reisner.json"), "0", "4", "--prime", "2", "--at", "m"]);
    assert_eq!(v["results"]["injective"], false);
    assert!(v["results"]["witness"].is_object());
    // H^0_n H^1_(x1) = H^1_(x1)(Z[x1]) = Z[x1, x1^-1] / Z[x1]
    let (_, v) = json(&["iterated", &data("x1.json"), "0", "1", "--at", "n"]);
    assert_eq!(v["results"]["pieces"][0]["text"], "Z");
    assert_eq!(v["results"]["associated_primes"], serde_json::json!(["(x1)"]));
}

#[test]
fn json_is_byte_deterministic() {
    let a = run(&["support", &data("reisner.json"), "--json"]).1;
    let b = run(&["support", &data("reisner.json"), "--json"]).1;
    assert_eq!(a, b);
    let (_, v) = json(&["support", &data("reisner.json"), "--j", "4"]);
    assert_eq!(
        v["results"][0]["support_text"],
        serde_json::json!(["(2, x1, x2, x3, x4, x5, x6)"])
    );
}

#[test]
fn small_oracle_run() {
    let (code, v) = json(&["oracle-check", "--count", "6", "--max-n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["failures"], 0);
}
