//! End-to-end tests of the `duel` binary: subcommand behavior, output
//! encodings, determinism across thread counts, and the exit-code policy.

use std::path::PathBuf;
use std::process::{Command, Output};

fn duel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duel"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal-termination")
}

fn scenario_path(name: &str) -> String {
    format!("{}/../../scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("duel-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file writes");
    path
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_of(output)).expect("stdout is valid JSON")
}

#[test]
fn case_study_prints_the_reference_table() {
    let output = duel(&["case-study"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    for row in [
        "t_star        17.95",
        "mu            3",
        "nu            4",
        "E[S_mu]       18",
        "E[T_nu]       21",
        "E[T_nu-1]     17",
        "time_unit     months",
    ] {
        assert!(text.contains(row), "missing row {row:?} in:\n{text}");
    }
}

#[test]
fn solve_reports_pinned_and_computed_crossings() {
    let output = duel(&["solve", "--scenario", &scenario_path("case_study.json"), "--format", "json"]);
    assert_eq!(exit_code(&output), 0);
    let doc = json_of(&output);
    assert_eq!(doc["t_star"].as_f64().unwrap(), 17.95);
    assert_eq!(doc["threshold_a"].as_f64().unwrap(), 17.95);

    let output = duel(&[
        "solve",
        "--scenario",
        &scenario_path("computed_crossing.json"),
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc = json_of(&output);
    // Two saturating curves with mean cycle 6 cross the certainty line at
    // 6 ln 2.
    let want = 6.0 * std::f64::consts::LN_2;
    assert!((doc["t_star"].as_f64().unwrap() - want).abs() <= 1e-8);
}

#[test]
fn simulate_is_byte_identical_across_thread_counts() {
    let base = [
        "simulate",
        "--scenario",
        &scenario_path("case_study_exponential.json"),
        "--replications",
        "2000",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let single = duel(&[&base[..], &["--threads", "1"]].concat());
    let threaded = duel(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!(exit_code(&single), 0);
    assert_eq!(exit_code(&threaded), 0);
    assert_eq!(stdout_of(&single), stdout_of(&threaded));

    let doc = json_of(&single);
    assert_eq!(doc["mode"], "monte-carlo");
    assert_eq!(doc["replications"].as_u64().unwrap(), 2000);
    assert_eq!(doc["time_unit"], "months");
    let win = doc["win_prob_a"]["mean"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&win));
    assert!(doc["win_prob_a"]["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_csv_has_the_stable_header() {
    let output = duel(&[
        "simulate",
        "--scenario",
        &scenario_path("case_study_exponential.json"),
        "--replications",
        "500",
        "--format",
        "csv",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.starts_with("quantity,mean,std_error,replications\n"), "{text}");
}

#[test]
fn analyze_recovers_the_closed_form_win_probability() {
    let output = duel(&[
        "analyze",
        "--scenario",
        &scenario_path("case_study_exponential.json"),
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc = json_of(&output);
    assert_eq!(doc["mode"], "analytic");
    let win = doc["win_prob_a"]["mean"].as_f64().unwrap();
    assert!((win - 0.4).abs() <= 1e-9, "win_prob_a = {win}");
    assert!(doc["win_prob_a"]["std_error"].is_null());
    assert!(doc["conditional_on_win"].is_object());
}

#[test]
fn classic_duel_solves_reference_grids() {
    // Equal linear grids: both players' chances cross one at step 5 and
    // the duel is symmetric.
    let output = duel(&[
        "classic-duel",
        "--p-a",
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
        "--p-b",
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc = json_of(&output);
    assert_eq!(doc["shoot_step"].as_u64().unwrap(), 5);
    assert_eq!(doc["value_a"], "1/2");
    assert_eq!(doc["winner"], "A");

    // B progresses at half speed: the crossing moves to step 7 and A holds
    // the 7/10 share.
    let output = duel(&[
        "classic-duel",
        "--p-a",
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
        "--p-b",
        "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc = json_of(&output);
    assert_eq!(doc["shoot_step"].as_u64().unwrap(), 7);
    assert_eq!(doc["value_a"], "7/10");
    assert_eq!(doc["value_b"], "3/10");
    assert_eq!(doc["winner"], "A");
}

#[test]
fn classic_duel_arithmetic_is_exact_where_f64_is_not() {
    // 0.1 + 0.89999999999999999 is below one by exactly 1e-17; both values
    // round to f64s summing to exactly 1.0, so floating-point parsing
    // would fire at step 1. The exact parser sees the digits and waits.
    let output = duel(&[
        "classic-duel",
        "--p-a",
        "0.1,1.0",
        "--p-b",
        "0.89999999999999999,1.0",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc = json_of(&output);
    assert_eq!(doc["shoot_step"].as_u64().unwrap(), 2);
    assert_eq!(doc["value_a"], "1/10");
    assert_eq!(doc["winner"], "B");
}

#[test]
fn classic_duel_rejects_malformed_probabilities() {
    let output = duel(&["classic-duel", "--p-a", "0.5,oops", "--p-b", "0.5,0.5"]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("invalid probability"));
}

#[test]
fn invalid_scenario_files_exit_one_with_anchored_errors() {
    let bad = temp_file(
        "bad-rate.json",
        r#"{
  "schema_version": 1,
  "time_unit": "months",
  "player_a": {
    "initial_delay": { "kind": "deterministic", "value": 0.0 },
    "cycle": { "kind": "exponential", "rate": -0.25 }
  },
  "player_b": {
    "initial_delay": { "kind": "deterministic", "value": 5.0 },
    "cycle": { "kind": "deterministic", "value": 4.0 }
  },
  "t_star": 17.95,
  "mode": "deterministic"
}
"#,
    );
    let output = duel(&["solve", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
    let err = stderr_of(&output);
    assert!(err.contains("rate must be positive"), "{err}");
    assert!(err.contains("line "), "{err}");
    assert!(stdout_of(&output).is_empty());
    std::fs::remove_file(bad).ok();
}

#[test]
fn missing_scenario_file_exits_one() {
    let output = duel(&["solve", "--scenario", "/nonexistent/duel.json"]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("/nonexistent/duel.json"));
}

#[test]
fn analyze_exits_two_when_conditioning_is_impossible() {
    // Player A cannot reach the threshold before player B, so the win
    // probability is zero and the conditional moments cannot be formed:
    // a numerical-accuracy failure, not a validation one.
    let hopeless = temp_file(
        "hopeless.json",
        r#"{
  "schema_version": 1,
  "time_unit": "months",
  "player_a": {
    "initial_delay": { "kind": "deterministic", "value": 1000.0 },
    "cycle": { "kind": "deterministic", "value": 6.0 }
  },
  "player_b": {
    "initial_delay": { "kind": "deterministic", "value": 0.0 },
    "cycle": { "kind": "deterministic", "value": 4.0 }
  },
  "t_star": 17.95,
  "mode": "analytic"
}
"#,
    );
    let output = duel(&["analyze", "--scenario", hopeless.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("win probability"), "{}", stderr_of(&output));
    std::fs::remove_file(hopeless).ok();
}

#[test]
fn check_inversion_passes_at_default_order_and_fails_at_low_order() {
    let output = duel(&["check-inversion"]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout_of(&output).contains("status"));

    let output = duel(&["check-inversion", "--order", "8", "--format", "json"]);
    assert_eq!(exit_code(&output), 2);
    // The document is still written so the failure can be inspected.
    let doc = json_of(&output);
    assert_eq!(doc["passed"], false);
    assert!(stderr_of(&output).contains("accuracy"));
}

#[test]
fn out_flag_writes_the_document_to_a_file() {
    let target = std::env::temp_dir().join(format!("duel-cli-out-{}.txt", std::process::id()));
    let direct = duel(&["case-study"]);
    let output = duel(&["case-study", "--out", target.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout_of(&output).is_empty());
    let written = std::fs::read_to_string(&target).expect("document written");
    assert_eq!(written, stdout_of(&direct));
    std::fs::remove_file(target).ok();
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let output = duel(&["simulate", "--no-such-flag"]);
    assert_eq!(exit_code(&output), 1);
    assert!(!stderr_of(&output).is_empty());

    let output = duel(&["--help"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    for sub in ["solve", "simulate", "analyze", "case-study", "classic-duel", "check-inversion"] {
        assert!(text.contains(sub), "help misses {sub}:\n{text}");
    }

    let output = duel(&["simulate", "--scenario", &scenario_path("case_study.json"), "--replications", "0"]);
    assert_eq!(exit_code(&output), 1);
}
