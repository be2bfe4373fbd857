use std::process::{Command, Output};

use serde_json::Value;

fn mirrorcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorcount"))
        .args(args)
        .env_remove("MIRRORCOUNT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn count_both_methods_agree() {
    let o = mirrorcount(&["count", "--n", "2", "--p", "5", "--m", "1", "--lambda", "1", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let r = v["results"].as_array().unwrap();
    assert_eq!(r.len(), 2);
    assert_eq!(r[0]["method"], "direct");
    assert_eq!(r[1]["method"], "gauss_formula");
    assert_eq!(r[0]["count_x"], r[1]["count_x"]);
    assert_eq!(r[0]["count_y"], r[1]["count_y"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("wall time"));
}

#[test]
fn verify_equal_passes_on_f5() {
    let o = mirrorcount(&["verify-equal", "--n", "2", "--p", "5", "--kmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["command"], "verify-equal");
    assert_eq!(v["results"][0]["theorem"], "equal");
    assert_eq!(v["results"][0]["summary"]["fail"], 0);
}

#[test]
fn non_prime_characteristic_is_a_usage_error() {
    let o = mirrorcount(&["count", "--n", "2", "--p", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(mirrorcount(&["count", "--bogus"]).status.code(), Some(2));
}

#[test]
fn budget_refusal_exits_three() {
    let o = mirrorcount(&["count", "--n", "3", "--p", "7", "--m", "3", "--lambda", "1", "--method", "direct", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failing_verification_exits_one_with_witness() {
    // the singular cubic psi = 1 over F_7 is a union of three lines: 21 points
    let o = mirrorcount(&["verify-cong", "--n", "2", "--p", "7"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let cong2x = &v["results"][1];
    assert_eq!(cong2x["theorem"], "cong2X");
    let witness = cong2x["cases"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["case"] == "k=1 psi=0")
        .unwrap();
    assert_eq!(witness["verdict"], "fail");
    assert_eq!(witness["values"]["value"], 21);
    assert_eq!(witness["key"]["p"], 7);
}

#[test]
fn singular_member_is_refused_by_quotient() {
    let o = mirrorcount(&["quotient", "--n", "2", "--p", "7", "--psi", "0", "--order", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mirrorcount(&["quotient", "--n", "2", "--p", "7", "--lambda", "1", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["results"][0]["coefficients"][0], "1");
}

#[test]
fn factor_reports_purity() {
    // 1 + 3T^2 has reciprocal roots of modulus sqrt(3)
    let o = mirrorcount(&["factor", "--coeffs", "1,0,3", "--q-eff", "3", "--weight", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["results"][0]["purity"]["pure"], true);
}

#[test]
fn cache_round_trip_with_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let args = ["count", "--n", "2", "--p", "7", "--m", "2", "--method", "both", "--cache-dir", path];
    let first = mirrorcount(&args);
    assert_eq!(first.status.code(), Some(0));
    assert!(dir.path().join("counts.json").exists());
    let mut verified = args.to_vec();
    verified.push("--verify-cache");
    let second = mirrorcount(&verified);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(json(&first)["results"], json(&second)["results"]);
}

#[test]
fn corrupted_cache_entry_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let args = ["count", "--n", "2", "--p", "5", "--lambda", "2", "--method", "direct", "--cache-dir", path];
    assert_eq!(mirrorcount(&args).status.code(), Some(0));
    let file = dir.path().join("counts.json");
    let mut cache: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let x = cache["entries"][0]["record"]["count_x"].as_u64().unwrap();
    cache["entries"][0]["record"]["count_x"] = (x + 1).into();
    std::fs::write(&file, serde_json::to_string(&cache).unwrap()).unwrap();
    let plain = mirrorcount(&args);
    assert_eq!(json(&plain)["results"][0]["count_x"], x + 1);
    let mut verified = args.to_vec();
    verified.push("--verify-cache");
    assert_eq!(mirrorcount(&verified).status.code(), Some(2));
}

#[test]
fn csv_reports_have_stable_columns() {
    let o = mirrorcount(&["verify-crt", "--n", "2", "--p", "7", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "theorem,grid,case,verdict,values");
    assert_eq!(text.lines().count(), 1 + 7);
}
