use std::process::Command;

use motive_workbench::sb2::VerificationReport;
use motive_workbench_cli::run;
use serde_json::Value;

fn cli(args: &[&str]) -> motive_workbench_cli::Outcome {
    run(std::iter::once("motive-workbench").chain(args.iter().copied()))
}

fn failing_ids(stdout: &str) -> Vec<String> {
    let report: VerificationReport = serde_json::from_str(stdout).unwrap();
    report.failed().iter().map(|c| c.check_id.clone()).collect()
}

#[test]
fn hasse_diagram_of_gr_2_5() {
    let out = cli(&["ring", "gr", "2", "5", "--hasse"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("10 Schubert classes"));
    assert!(out.stdout.contains("12 covering relations"));
    for edge in ["σ₃ -- h₄", "h₄ -- g₅", "g₅ -- pt", "g₃ -- g₄", "1 -- σ₁", "σ₁ -- g₂"] {
        assert!(out.stdout.contains(edge), "{edge}");
    }
    let json: Value = serde_json::from_str(&cli(&["--format", "json", "ring", "gr", "2", "5", "--hasse"]).stdout).unwrap();
    assert_eq!(json["basis"].as_array().unwrap().len(), 10);
    assert_eq!(json["hasse"].as_array().unwrap().len(), 12);
}

#[test]
fn expressions() {
    assert_eq!(cli(&["mult", "g2*g2"]).stdout, "g₄\n");
    assert_eq!(cli(&["mult", "sigma1*sigma1"]).stdout, "σ₂ + g₂\n");
    assert_eq!(cli(&["mult", "1"]).stdout, "1\n");
    assert_eq!(cli(&["mult", "mod(rho^3 o t(rho^2), 5)"]).stdout, "1×H⁴ + H×H³ + H²×H² + H³×H + H⁴×1\n");
    assert_eq!(cli(&["--space", "1,5", "mult", "H^2*H^2"]).stdout, "H⁴\n");
    assert_eq!(cli(&["--ring", "Q", "mult", "rho^3 - 5/2*(g5 x H)"]).code, 0);
    let json: Value = serde_json::from_str(&cli(&["--format", "json", "mult", "g2*g2"]).stdout).unwrap();
    assert_eq!(json["kind"], "class");
    assert_eq!(json["value"]["terms"][0]["partition"], serde_json::json!([2, 2]));
}

#[test]
fn expression_errors_are_positioned() {
    let out = cli(&["mult", "g2 *"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("byte 4"), "{}", out.stderr);
    let out = cli(&["mult", "g2 o g3"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("type error at 0..7"), "{}", out.stderr);
    let out = cli(&["mult", "5/2*g5"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--ring Q"), "{}", out.stderr);
}

#[test]
fn decompositions() {
    let base = ["decompose", "--series", "A", "--rank", "4", "--index", "5", "--flag", "1,2"];
    let out = cli(&[&base[..], &["--remove", "1"]].concat());
    assert_eq!((out.code, out.stdout.as_str()), (0, "X(2) + X(2)(1)\n"));
    let out = cli(&[&base[..], &["--remove", "2", "--canonical"]].concat());
    assert_eq!(out.stdout, "SB(A) + SB(A)(1) + SB(A)(2) + SB(A)(3)\n");
    let out = cli(&["decompose", "--series", "A", "--rank", "4", "--index", "4", "--flag", "1,2", "--remove", "1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("step 1") && out.stderr.contains("Z/4Z"), "{}", out.stderr);
}

#[test]
fn poincare_consistency() {
    let out = cli(&["poincare", "--series", "A", "--rank", "4", "--index", "5", "--flag", "1,2", "--remove", "1", "--confluence"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("consistent: true"));
    let out = cli(&["poincare", "--series", "F4", "--rank", "4", "--flag", "3,6", "--confluence"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn sb2_verification() {
    let out = cli(&["--format", "json", "verify", "sb2"]);
    assert_eq!(out.code, 1);
    assert_eq!(failing_ids(&out.stdout), vec!["iso_q_pt"]);
    assert_eq!(out.stdout, cli(&["--format", "json", "verify", "sb2"]).stdout);

    let out = cli(&["--format", "json", "--ring", "Q", "verify", "sb2"]);
    assert_eq!(failing_ids(&out.stdout), vec!["iso_q_pt", "localized_2", "localized_3"]);

    let out = cli(&["--format", "json", "verify", "sb2", "--modulus", "7"]);
    assert_eq!(failing_ids(&out.stdout), vec!["delta_identity", "iso_q_pt"]);

    let text = cli(&["verify", "sb2"]).stdout;
    assert!(text.contains("PASS  delta_identity"));
    assert!(text.ends_with("29 passed, 1 failed\n"));
}

#[test]
fn randomized_properties() {
    let out = cli(&["--format", "json", "--seed", "11", "verify", "props", "--trials", "30"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let json: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(json["seed"], 11);
    assert_eq!(json["properties"].as_array().unwrap().len(), 5);
    assert_eq!(out.stdout, cli(&["--format", "json", "--seed", "11", "verify", "props", "--trials", "30"]).stdout);
}

#[test]
fn reports() {
    let out = cli(&["report", "ks"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("F + F(1) + F(2) + F(3)"), "{}", out.stdout);
    let out = cli(&["report", "gensb", "4", "2"]);
    assert!(out.stdout.contains("SB(A) + SB(A)(2)"), "{}", out.stdout);
    assert_eq!(cli(&["report", "gensb", "5", "2"]).code, 2);
    let json: Value = serde_json::from_str(&cli(&["--format", "json", "report", "obstruction", "4", "2"]).stdout).unwrap();
    assert_eq!((json["via_flag"].as_u64(), json["via_sb"].as_u64()), (Some(2), Some(4)));
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&["frobnicate"]).code, 2);
    assert_eq!(cli(&["--ring", "R", "mult", "1"]).code, 2);
    assert_eq!(cli(&["--space", "2", "mult", "1"]).code, 2);
    assert_eq!(cli(&["ring", "gr", "2", "9"]).code, 2);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn binary_exit_codes_and_rank_cap() {
    let bin = env!("CARGO_BIN_EXE_motive-workbench");
    let status = Command::new(bin).args(["ring", "gr", "2", "5"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let out = Command::new(bin).args(["ring", "gr", "2", "5"]).env("MOTIVE_WORKBENCH_MAX_RANK", "4").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MOTIVE_WORKBENCH_MAX_RANK"));
    let out = Command::new(bin).args(["verify", "sb2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin).args(["mult", "("]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
