use std::process::{Command, Output};

use serde_json::Value;

fn futaki(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_futaki"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

const SINGLE: &str = r#"{"blocks":[{"eigenvalue":"1","size":2}]}"#;
const PAIR: &str = r#"{"blocks":[{"eigenvalue":"1","size":1},{"eigenvalue":"2","size":1}]}"#;

#[test]
fn verify_single_block_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"blocks":[{"eigenvalue":"1","size":2}],"truncation_order":3,"samples":1,"seed":7}"#,
    )
    .unwrap();
    let out = futaki(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["overall"], true);
    assert_eq!(v["per_order"][1]["coefficient"], "2*theta");
    assert_eq!(v["per_order"][0]["coefficient"], "0");
    assert_eq!(v["defect"]["eps*theta"], "2");
    assert_eq!(v["defect"]["eps^2*theta*mu"], "-2");
    assert_eq!(v["defect"]["eps^3*mu"], "4/3");
}

#[test]
fn verify_with_resamples_reports_each() {
    let out = futaki(&["verify", "--data", PAIR, "--samples", "4", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["per_order"][1]["coefficient"], "2*theta");
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
    for s in v["samples"].as_array().unwrap() {
        assert_eq!(s["overall"], true);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["verify", "--data", PAIR, "--samples", "3", "--seed", "42"];
    assert_eq!(futaki(&args).stdout, futaki(&args).stdout);
    let args = ["perturb", "--data", SINGLE, "--samples", "3", "--seed", "42"];
    assert_eq!(futaki(&args).stdout, futaki(&args).stdout);
}

#[test]
fn seed_changes_resampled_eigenvalues() {
    let a = json_of(&futaki(&["verify", "--data", PAIR, "--samples", "2", "--seed", "1"]));
    let b = json_of(&futaki(&["verify", "--data", PAIR, "--samples", "2", "--seed", "2"]));
    assert_ne!(a["samples"][0]["data"], b["samples"][0]["data"]);
}

#[test]
fn repeated_eigenvalue_is_invalid_input() {
    let data = r#"{"blocks":[{"eigenvalue":"3/2","size":1},{"eigenvalue":"3/2","size":2}]}"#;
    let out = futaki(&["verify", "--data", data]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "invalid_jordan_data");
}

#[test]
fn zero_eigenvalue_and_bad_rational_are_invalid_input() {
    let out = futaki(&["gk", "--data", r#"{"blocks":[{"eigenvalue":"0","size":2}]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "invalid_jordan_data");
    let out = futaki(&["gk", "--data", r#"{"blocks":[{"eigenvalue":"1/0","size":2}]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "invalid_rational");
}

#[test]
fn malformed_config_and_low_truncation() {
    let out = futaki(&["verify", "--data", "{not json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "malformed_config");
    let out = futaki(&["verify", "--data", SINGLE, "--truncation", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "invalid_argument");
    let out = futaki(&["verify", "--config", "/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "io");
    let out = futaki(&["verify", "--data", SINGLE, "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gk_two_simple_blocks() {
    let out = futaki(&["gk", "--data", PAIR]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["values"], serde_json::json!({"1": "1", "2": "0", "3": "-1/2"}));
    assert_eq!(v["all_agree"], true);
}

#[test]
fn comb_row_for_l_two() {
    let out = futaki(&["comb", "--l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["values"], serde_json::json!(["0", "0", "8", "0"]));
    assert_eq!(v["pass"], true);
}

#[test]
fn residue_of_theta_cubed() {
    let out = futaki(&["residue", "--data", SINGLE, "--phi", "theta_power:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(
        v["residue"],
        serde_json::json!({"theta^3": "1", "eps^2*theta": "-3", "eps^3": "2"})
    );
    let out = futaki(&["residue", "--data", SINGLE, "--phi", "cube"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn psi_families_for_two_blocks_pass() {
    let out = futaki(&["psi", "--data", PAIR]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["families"].as_array().unwrap().len(), 3);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn psi_middle_family_fails_for_three_blocks() {
    let data = r#"{"blocks":[{"eigenvalue":"1","size":1},{"eigenvalue":"2","size":1},{"eigenvalue":"3","size":1}]}"#;
    let out = futaki(&["psi", "--data", data, "--family", "mid:2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["characteristic"][0]["pass"], true);
    let out = futaki(&["psi", "--data", data, "--family", "mid:4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn detb_symbolic_comparison() {
    let data = r#"{"blocks":[{"eigenvalue":"1","size":3},{"eigenvalue":"2","size":1}]}"#;
    let out = futaki(&["detb", "--data", data]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["symbolic"]["certificate"], true);
    assert_eq!(v["symbolic"]["determinant_matches"], true);
    assert_eq!(v["u2_coefficient"], serde_json::json!({"1": "1", "u_2": "-1", "u_2^2": "1"}));
}

#[test]
fn perturb_and_poincare() {
    let out = futaki(&["perturb", "--data", SINGLE, "--samples", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["runs"].as_array().unwrap().len(), 3);
    let out = futaki(&["poincare", "--data", PAIR]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["poincare_domain"], true);
    assert_eq!(v["resonant"], true);
}

#[test]
fn output_file_and_pretty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = futaki(&["gk", "--data", PAIR, "--pretty", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\n  "));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["all_agree"], true);
}

#[test]
fn emitted_rationals_round_trip() {
    let v = json_of(&futaki(&["verify", "--data", PAIR, "--samples", "3", "--seed", "9"]));
    for s in v["samples"].as_array().unwrap() {
        for b in s["data"]["blocks"].as_array().unwrap() {
            let text = b["eigenvalue"].as_str().unwrap();
            let x = futaki_core::kernel::parse_rational(text).unwrap();
            assert_eq!(futaki_core::kernel::rational::format_rational(&x), text);
        }
    }
}
