use std::process::Command;

use darboux_core::darboux::{existence_conditions, FirstOrderM, HyperbolicL};
use darboux_core::invariants::{evolution_invariants, gauge_invariants};
use serde_json::{json, Value};

fn darboux(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 output");
    let value = serde_json::from_str(stdout.trim()).unwrap_or_else(|e| panic!("{e}: {stdout}"));
    (out.status.code().expect("exit code"), value)
}

const L: &str = "Dx*Dy + y*Dx + x*Dy + (x*y+1)";
const M: &str = "Dx + Dy + (x+y)";

#[test]
fn check_plain_operator() {
    let (code, v) = darboux(&["check", "--L", "Dx*Dy", "--M", "Dx - Dy"]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"exists": true, "conditions": ["0", "0"]}));
}

#[test]
fn evolution_invariants_of_worked_pair() {
    let (code, v) = darboux(&["invariants", "--evolution", "--L", L, "--M", M]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"q": "1", "I2": "0", "I3": "-2"}));
}

#[test]
fn output_is_byte_stable_and_ordered() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_darboux"))
            .args(["invariants", "--evolution", "--L", L, "--M", M])
            .output()
            .unwrap()
            .stdout
    };
    let first = run();
    assert_eq!(first, run());
    assert_eq!(String::from_utf8(first).unwrap().trim(), r#"{"q":"1","I2":"0","I3":"-2"}"#);
}

#[test]
fn verbs_match_library_calls() {
    let l = HyperbolicL::parse(L).unwrap();
    let m = FirstOrderM::parse(M).unwrap();

    let (_, v) = darboux(&["invariants", "--L", L, "--M", M]);
    assert_eq!(v, serde_json::to_value(gauge_invariants(&l, &m)).unwrap());

    let (_, v) = darboux(&["invariants", "--evolution", "--L", L, "--M", M]);
    assert_eq!(v, serde_json::to_value(evolution_invariants(&l, &m).unwrap()).unwrap());

    let (e1, e2) = existence_conditions(&l, &m);
    let (_, v) = darboux(&["check", "--L", L, "--M", M]);
    assert_eq!(v["conditions"], json!([e1.to_string(), e2.to_string()]));
}

#[test]
fn verify_suite_contract() {
    let (code, v) = darboux(&["verify", "thm-i30", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["cases"], 20);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["results"].as_array().unwrap().len(), 20);
}

#[test]
fn unknown_suite_is_an_input_error() {
    let (code, v) = darboux(&["verify", "nonexistent"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "unknown-suite");
}

#[test]
fn parse_errors_report_a_position() {
    let (code, v) = darboux(&["check", "--L", "Dx*Dy + (x", "--M", "Dx"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["argument"], "L");
    assert_eq!(v["error"]["position"], 10);
}

#[test]
fn wrong_operator_shape_is_an_input_error() {
    let (code, v) = darboux(&["check", "--L", "Dx^2", "--M", "Dx"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "input");
}

#[test]
fn strict_check_fails_on_nonzero_conditions() {
    let args = ["check", "--L", "Dx*Dy", "--M", "Dx + x*Dy + 1"];
    let (code, v) = darboux(&args);
    assert_eq!(code, 0);
    assert_eq!(v["exists"], false);
    let (code, _) = darboux(&[&args[..], &["--strict"]].concat());
    assert_eq!(code, 1);
}

#[test]
fn darboux11_and_reconstruct_round_trip() {
    let (code, v) = darboux(&["darboux11", "--L", "Dx*Dy", "--psi1", "x+1", "--psi2", "y"]);
    assert_eq!(code, 0);
    assert_eq!(v["q"], "y/(x + 1)");
    let m = v["M"].as_str().unwrap().to_string();

    let (_, inv) = darboux(&["invariants", "--L", "Dx*Dy", "--M", &m]);
    let field = |k: &str| inv[k].as_str().unwrap().to_string();
    let (code, v) = darboux(&[
        "reconstruct", "--q", &field("q"), "--m", &field("m"), "--h", &field("h"),
        "--R", &field("R"), "--z", "y/(x+1)", "--z1", "x+1",
    ]);
    assert_eq!(code, 0);
    let (l1, m1) = (v["operators"][0].as_str().unwrap(), v["operators"][1].as_str().unwrap());
    let (_, again) = darboux(&["invariants", "--L", l1, "--M", m1]);
    assert_eq!(again, inv);
}

#[test]
fn kernel_violation_is_a_mathematical_failure() {
    let (code, v) = darboux(&["darboux11", "--L", "Dx*Dy", "--psi1", "1", "--psi2", "x*y"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "math");
}

#[test]
fn wronskian_and_compose() {
    let (code, v) = darboux(&["wronskian", "--L", "Dx*Dy", "--psi", "1", "--psi", "x+y"]);
    assert_eq!(code, 0);
    assert_eq!(v["operator"], "-Dx + Dy");
    let (_, v) = darboux(&["compose", "--A", "Dx + y", "--B", "x*Dy"]);
    assert_eq!(v["operator"], "x*Dx*Dy + (x*y + 1)*Dy");
}

#[test]
fn evolve_preserves_invariants() {
    let (code, v) = darboux(&["evolve", "--L", L, "--M", M, "--alpha", "x*y^2", "--beta", "x-y"]);
    assert_eq!(code, 0);
    let (l1, m1) = (v["operators"][0].as_str().unwrap(), v["operators"][1].as_str().unwrap());
    let (_, before) = darboux(&["invariants", "--evolution", "--L", L, "--M", M]);
    let (_, after) = darboux(&["invariants", "--evolution", "--L", l1, "--M", m1]);
    assert_eq!(before, after);
}

#[test]
fn arguments_can_come_from_files() {
    let dir = std::env::temp_dir().join(format!("darboux-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l.txt");
    std::fs::write(&path, format!("{L}\n")).unwrap();
    let arg = format!("@{}", path.display());
    let (code, v) = darboux(&["invariants", "--evolution", "--L", &arg, "--M", M]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, 0);
    assert_eq!(v["I3"], "-2");

    let (code, v) = darboux(&["check", "--L", "@/nonexistent/file", "--M", M]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "input");
}

#[test]
fn pretty_output_parses_to_the_same_value() {
    let (_, compact) = darboux(&["check", "--L", "Dx*Dy", "--M", "Dx - Dy"]);
    let (_, pretty) = darboux(&["--pretty", "check", "--L", "Dx*Dy", "--M", "Dx - Dy"]);
    assert_eq!(compact, pretty);
}

#[test]
fn usage_errors_exit_with_two() {
    let (code, v) = darboux(&["bogus"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
}
