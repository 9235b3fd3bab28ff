use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pft"))
        .args(args)
        .env_remove("PFT_WORKERS")
        .output()
        .expect("pft runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn synth(name: &str, args: &[&str]) -> String {
    let path = tmp(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["gate", "synth"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &p]);
    let out = pft(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn code_info_reports_parameters() {
    let out = pft(&["code", "info", "five"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!((v["n"].as_u64(), v["k"].as_u64(), v["d"].as_u64()), (Some(5), Some(1), Some(3)));
    assert_eq!(v["css"], false);
    assert!(v["anticommuting_pair"].is_array());
}

#[test]
fn shor_scan_has_no_implication_counterexamples() {
    let out = pft(&["code", "scan", "shor9"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["implication_counterexamples"], 0);
}

#[test]
fn cz_verify_passes_and_is_deterministic() {
    let c = synth("cz.txt", &["--codes", "five", "five", "--target", "ZZ"]);
    let args = ["gate", "verify", &c, "--codes", "five", "five", "--oracle-sample", "0.2", "--seed", "3"];
    let a = pft(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let v = json(&a);
    assert_eq!(v["pass"], true);
    assert_eq!(v["verification"]["pieces"], 2);
    assert_eq!(v["oracle"]["agree"], true);
    assert_eq!(v["logical_action"]["tableau"]["pass"], true);
    assert!(v["verification"].get("elapsed_ms").is_none());

    let b = Command::new(env!("CARGO_BIN_EXE_pft"))
        .args(args)
        .env("PFT_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unpieced_cz_fails_with_exit_one() {
    let c = synth("cz1.txt", &["--codes", "five", "five", "--target", "ZZ", "--unpieced"]);
    let out = pft(&["gate", "verify", &c, "--codes", "five", "five"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert!(!v["verification"]["failures"].as_array().unwrap().is_empty());
    // The gate itself is still right.
    assert_eq!(v["logical_action"]["pass"], true);
}

#[test]
fn lookup_decoder_fails_the_pieced_cz() {
    let c = synth("cz2.txt", &["--codes", "five", "five", "--target", "ZZ"]);
    let out = pft(&["gate", "verify", &c, "--codes", "five", "five", "--decoder", "lookup"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn timing_flag_adds_elapsed() {
    let c = synth("cz3.txt", &["--codes", "five", "five", "--target", "ZZ"]);
    let v = json(&pft(&["gate", "verify", &c, "--codes", "five", "five", "--timing"]));
    assert!(v["verification"]["elapsed_ms"].is_u64());
}

#[test]
fn ccz_cuts_by_both_routes() {
    let c = synth("ccz.txt", &["--codes", "five_prime", "five_prime", "five_prime", "--target", "ZZZ"]);
    let codes = ["--codes", "five_prime", "five_prime", "five_prime"];
    let mut args = vec!["analyze", "nonstabilizer", &c];
    args.extend_from_slice(&codes);
    let v = json(&pft(&args));
    assert_eq!(v["routes_agree"], true);
    let cuts = v["cuts"].as_array().unwrap();
    assert_eq!(cuts.len(), 5);
    assert_eq!(cuts[1]["criterion_nonstabilizer"], true);
    assert_eq!(cuts[0]["criterion_nonstabilizer"], false);

    let mut args = vec!["gate", "verify", &c];
    args.extend_from_slice(&codes);
    let out = pft(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verification"]["pieces"], 4);
}

#[test]
fn shor_cz_search_finds_three_pieces() {
    let c = synth("shor.txt", &["--codes", "shor9", "shor9", "--target", "ZZ"]);
    let out = pft(&["gate", "verify", &c, "--codes", "shor9", "shor9", "--search-pieces", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["verification"]["skipped"].is_string());
    assert_eq!(v["search"]["min_pieces"], 3);
    assert_eq!(v["search"]["refuted"].as_array().unwrap().len(), 2);
}

#[test]
fn comparison_markdown_and_json() {
    let out = pft(&["resources", "compare", "--markdown"]);
    assert!(out.status.success());
    let md = String::from_utf8(out.stdout).unwrap();
    for pct in ["48.1%", "4.5%", "45.5%", "49.2%"] {
        assert!(md.contains(pct), "{md}");
    }
    let v = json(&pft(&["resources", "table1"]));
    assert_eq!(v["identities_hold"], true);
    assert_eq!(v["pieceable"]["ccz_count"], 21);
}

#[test]
fn resource_count_schedules_plain_circuits() {
    let c = synth("ccz_count.txt", &["--codes", "five_prime", "five_prime", "five_prime", "--target", "ZZZ"]);
    let v = json(&pft(&["resources", "count", &c]));
    assert_eq!(v["metrics"]["ccz_count"], 27);
    assert_eq!(v["scheduled_here"], true);
}

#[test]
fn json_circuits_round_trip() {
    let c = synth("cz.json", &["--codes", "five", "five", "--target", "ZZ", "--json"]);
    let out = pft(&["gate", "verify", &c, "--codes", "five", "five", "--skip-action"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out).get("logical_action").is_none());
}

#[test]
fn errors_exit_two() {
    let out = pft(&["code", "info", "no_such_code"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let c = synth("cz4.txt", &["--codes", "five", "five", "--target", "ZZ"]);
    assert_eq!(pft(&["gate", "verify", &c, "--codes", "five"]).status.code(), Some(2));
}
