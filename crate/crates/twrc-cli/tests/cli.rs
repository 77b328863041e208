//! Exit-code and output-contract tests for the command-line interface.

use std::process::{Command, Output};

fn twrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twrc"))
        .args(args)
        .env_remove("TWRC_SEED")
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn member_exit_codes() {
    let member = twrc(&[
        "region", "member", "--region", "outer", "--p1", "1", "--p2", "1", "--pr1", "3", "--pr2",
        "3", "--tuple", "0.5,0.5,0,0",
    ]);
    assert_eq!(exit_code(&member), 0);
    let non_member = twrc(&[
        "region", "member", "--region", "conv-mac", "--p1", "1", "--p2", "1", "--pr1", "3",
        "--pr2", "3", "--tuple", "0.5,0.5,0,0",
    ]);
    assert_eq!(exit_code(&non_member), 1);
    let stdout = String::from_utf8(non_member.stdout).unwrap();
    assert!(stdout.contains("\"member\":false"), "stdout: {stdout}");
}

#[test]
fn malformed_tuple_is_a_usage_error() {
    let out = twrc(&[
        "region", "member", "--region", "outer", "--p1", "1", "--p2", "1", "--pr1", "3", "--pr2",
        "3", "--tuple", "-1,0,0,0",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(out.stdout.is_empty(), "no stdout on usage errors");
    assert!(!out.stderr.is_empty());
}

#[test]
fn domain_error_writes_one_stderr_line_and_no_stdout() {
    // NaN power passes clap but fails domain validation.
    let out = twrc(&[
        "region", "member", "--region", "outer", "--p1", "nan", "--p2", "1", "--pr1", "3",
        "--pr2", "3", "--tuple", "0,0,0,0",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
}

#[test]
fn missing_required_argument_is_a_usage_error() {
    let out = twrc(&[
        "sim", "ser", "--n", "8", "--snrs", "1", "--trials", "5", "--p1", "1", "--p2", "8",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn slice_emits_the_full_row_grid() {
    let out = twrc(&[
        "region", "slice", "--p1", "1", "--p2", "1", "--pr1", "3", "--pr2", "3", "--axes",
        "r12,r21", "--fix", "r1r=0,r2r=0", "--resolution", "3", "--grid-k", "8",
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "region,ray,r12,r21");
    assert_eq!(lines.len(), 1 + 12, "3 rays x 4 regions plus header");
    // Region-major stable ordering.
    assert!(lines[1].starts_with("outer,0,"));
    assert!(lines[4].starts_with("conv-mac,0,"));
    assert!(lines[7].starts_with("eer-br,0,"));
    assert!(lines[10].starts_with("hull,0,"));
}

#[test]
fn witness_reports_the_certifying_parameters() {
    let out = twrc(&[
        "gap", "witness", "--p1", "15", "--p2", "15", "--tuple", "2,2,0,0",
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"alpha\":0.7586876736796313"), "stdout: {stdout}");
    assert!(stdout.contains("\"delta\":0.0"));
    let outside = twrc(&[
        "gap", "witness", "--p1", "1", "--p2", "1", "--tuple", "0.5,0.5,0.1,0",
    ]);
    assert_eq!(exit_code(&outside), 2);
}

#[test]
fn seed_env_fallback_and_flag_override() {
    let env_run = Command::new(env!("CARGO_BIN_EXE_twrc"))
        .args(["gap", "sweep", "--trials", "50"])
        .env("TWRC_SEED", "9")
        .output()
        .unwrap();
    let flag_run = twrc(&["gap", "sweep", "--trials", "50", "--seed", "9"]);
    assert_eq!(env_run.stdout, flag_run.stdout);
    let override_run = Command::new(env!("CARGO_BIN_EXE_twrc"))
        .args(["gap", "sweep", "--trials", "50", "--seed", "4"])
        .env("TWRC_SEED", "9")
        .output()
        .unwrap();
    assert_ne!(override_run.stdout, flag_run.stdout);
    let bad_env = Command::new(env!("CARGO_BIN_EXE_twrc"))
        .args(["gap", "sweep", "--trials", "50"])
        .env("TWRC_SEED", "not-a-seed")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn csv_format_always_has_a_header() {
    let out = twrc(&[
        "region", "member", "--region", "eer-br", "--p1", "1", "--p2", "1", "--pr1", "3",
        "--pr2", "3", "--tuple", "0,0.2,0,0.1", "--format", "csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("region,member,constraint,slack\n"));
    // Labels containing commas stay a single CSV field.
    assert!(stdout.contains("\"min(r12, r21) <= D(p1)\""), "stdout: {stdout}");
}

#[test]
fn db_flag_converts_powers() {
    // 0 dB = linear 1: both runs must agree.
    let linear = twrc(&[
        "region", "member", "--region", "outer", "--p1", "1", "--p2", "1", "--pr1", "1",
        "--pr2", "1", "--tuple", "0.3,0.3,0,0",
    ]);
    let db = twrc(&[
        "region", "member", "--region", "outer", "--p1", "0", "--p2", "0", "--pr1", "0",
        "--pr2", "0", "--db", "--tuple", "0.3,0.3,0,0",
    ]);
    assert_eq!(linear.stdout, db.stdout);
}

#[test]
fn sim_run_rejects_operating_points_outside_the_region() {
    let out = twrc(&[
        "sim", "run", "--mode", "genie", "--q", "4", "--n", "3", "--trials", "10", "--seed",
        "1", "--p1", "6", "--p2", "6", "--rates", "2,2,0,0",
    ]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("outside the EER-BR MAC-phase region"), "stderr: {stderr}");
}
