//! Argument parsing, dispatch, and exit-code policy.
//!
//! One binary, six subcommands: `solve` (crossing moment only), `simulate`
//! (Monte Carlo), `analyze` (closed-form route), `case-study` (bundled
//! reference scenario), `classic-duel` (round-based marksmanship duel in
//! exact rational arithmetic), and `check-inversion` (transform pipeline
//! self-test). Every subcommand writes one result document to standard
//! output or `--out`, encoded per `--format`.
//!
//! Exit codes: `0` success, `1` validation or input errors (bad flags,
//! unreadable or invalid scenario files, domain errors), `2` numerical
//! accuracy failures (quadrature that cannot certify its tolerance, or a
//! `check-inversion` run outside tolerance).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use duel_core::case_study::run_case_study;
use duel_core::classic::{
    backward_induction, classical_duel, ClassicalDuel, Player, Ratio, TurnOrder,
};
use duel_core::moments::{self, DEFAULT_STEP};
use duel_core::Error;

use crate::parallel::{available_threads, simulate_parallel};
use crate::report::{
    emit_report_with_unit, quantities_to_csv, quantities_to_human, Quantity, ReportFormat,
};
use crate::scenario::{load_scenario, ScenarioError, ScenarioFile};
use crate::selftest::{run_transform_checks, PairCheck, CHECK_ORDER, FORWARD_TOL, INVERSE_TOL};

/// Anything the binary can fail with, mapped onto the exit-code policy by
/// [`CliError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A file could not be read or written.
    #[error("{}: {source}", path.display())]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying IO error.
        source: std::io::Error,
    },
    /// A scenario file failed to parse or validate.
    #[error("{}: {source}", path.display())]
    Scenario {
        /// Offending path.
        path: PathBuf,
        /// Line-anchored parse or validation error.
        source: ScenarioError,
    },
    /// The solver rejected the inputs or could not certify its accuracy.
    #[error(transparent)]
    Solver(#[from] Error),
    /// A flag value was malformed.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit code: `2` for accuracy failures, `1` for everything
    /// else (validation, IO, usage).
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(err) if !err.is_validation() => 2,
            _ => 1,
        }
    }
}

/// Top-level command line.
#[derive(Debug, Parser)]
#[command(
    name = "duel",
    version,
    about = "Stochastic duel solver: crossing moments, renewal simulation, and closed-form cross-checks"
)]
pub struct Cli {
    /// Output encoding for the result document.
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: ReportFormat,

    /// Write the result document to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// The subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve the crossing moment and firing thresholds of a scenario.
    Solve {
        /// Scenario file (JSON).
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
    },
    /// Monte Carlo decision report for a scenario.
    Simulate {
        /// Scenario file (JSON).
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Replication count (defaults to the scenario file's value).
        #[arg(long, value_name = "N")]
        replications: Option<u64>,
        /// Base seed (defaults to the scenario file's value).
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        /// Worker threads (defaults to all cores); the report is
        /// bit-identical for every value.
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
    },
    /// Closed-form decision report via the transform route.
    Analyze {
        /// Scenario file (JSON).
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Finite-difference step for the conditional moments.
        #[arg(long, value_name = "H", default_value_t = DEFAULT_STEP)]
        step: f64,
    },
    /// Reproduce the bundled reference scenario end to end.
    CaseStudy,
    /// Solve a round-based duel from per-step hit probabilities, exactly.
    ClassicDuel {
        /// Player A's hit probabilities, comma-separated decimals.
        #[arg(long = "p-a", value_name = "LIST", value_delimiter = ',', required = true)]
        p_a: Vec<String>,
        /// Player B's hit probabilities, comma-separated decimals.
        #[arg(long = "p-b", value_name = "LIST", value_delimiter = ',', required = true)]
        p_b: Vec<String>,
    },
    /// Verify the transform pipeline against closed-form pairs.
    CheckInversion {
        /// Inversion order (even, 8 through 20).
        #[arg(long, value_name = "N", default_value_t = CHECK_ORDER)]
        order: usize,
    },
}

/// Parses the command line and runs it, translating every outcome into a
/// process exit code. This is the whole body of `fn main`.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version render on stdout and exit clean; real
            // parse errors render on stderr and exit as validation.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Dispatches one parsed command line, writing the result document to
/// `--out` or standard output.
///
/// # Errors
///
/// Everything in [`CliError`]; `check-inversion` writes its document even
/// when it then fails with an accuracy error.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve { scenario } => {
            let file = load_file(scenario)?;
            let duel = file.to_duel();
            let t_star = duel.resolve_t_star()?;
            let (threshold_a, threshold_b) = duel.resolve_thresholds()?;
            let doc = match cli.format {
                ReportFormat::Json => pretty_json(&json!({
                    "t_star": t_star,
                    "threshold_a": threshold_a,
                    "threshold_b": threshold_b,
                })),
                format => {
                    let rows = vec![
                        Quantity::plain("t_star", t_star, "crossing moment of the success curves"),
                        Quantity::plain("threshold_a", threshold_a, "player A firing threshold"),
                        Quantity::plain("threshold_b", threshold_b, "player B firing threshold"),
                    ];
                    rows_to_doc(&rows, format)
                }
            };
            write_doc(cli.out.as_deref(), &doc)
        }
        Command::Simulate {
            scenario,
            replications,
            seed,
            threads,
        } => {
            let file = load_file(scenario)?;
            let replications = replications.unwrap_or(file.replications);
            let seed = seed.unwrap_or(file.seed);
            let threads = threads.unwrap_or_else(available_threads);
            let report = simulate_parallel(&file.to_duel(), replications, seed, threads)?;
            let doc = emit_report_with_unit(&report, cli.format, Some(&file.time_unit));
            write_doc(cli.out.as_deref(), &doc)
        }
        Command::Analyze { scenario, step } => {
            let file = load_file(scenario)?;
            let report = moments::moments(&file.to_duel(), *step)?;
            let doc = emit_report_with_unit(&report, cli.format, Some(&file.time_unit));
            write_doc(cli.out.as_deref(), &doc)
        }
        Command::CaseStudy => {
            let report = run_case_study();
            let doc = emit_report_with_unit(&report, cli.format, Some("months"));
            write_doc(cli.out.as_deref(), &doc)
        }
        Command::ClassicDuel { p_a, p_b } => {
            let p_a = parse_probability_list(p_a)?;
            let p_b = parse_probability_list(p_b)?;
            let duel = ClassicalDuel::new(p_a, p_b)?;
            let (shoot_step, winner) = classical_duel(&duel)?;
            let solution = backward_induction(&duel, TurnOrder::AFirst);
            let doc = match cli.format {
                ReportFormat::Json => pretty_json(&json!({
                    "shoot_step": shoot_step,
                    "value_a": ratio_string(solution.value_a),
                    "value_a_decimal": solution.value_a.to_f64(),
                    "value_b": ratio_string(solution.value_b),
                    "value_b_decimal": solution.value_b.to_f64(),
                    "winner": player_name(winner),
                })),
                format => {
                    let rows = vec![
                        Quantity::plain(
                            "shoot_step",
                            shoot_step,
                            "first step where the hit probabilities sum to at least one",
                        ),
                        Quantity::plain(
                            "winner",
                            player_name(winner),
                            "rational-play winner under the A-first order",
                        ),
                        Quantity::plain(
                            "value_a",
                            ratio_string(solution.value_a),
                            &format!(
                                "player A win probability under rational play ({} as decimal)",
                                solution.value_a.to_f64()
                            ),
                        ),
                        Quantity::plain(
                            "value_b",
                            ratio_string(solution.value_b),
                            &format!(
                                "player B win probability under rational play ({} as decimal)",
                                solution.value_b.to_f64()
                            ),
                        ),
                    ];
                    rows_to_doc(&rows, format)
                }
            };
            write_doc(cli.out.as_deref(), &doc)
        }
        Command::CheckInversion { order } => {
            let checks = run_transform_checks(*order)?;
            let all_passed = checks.iter().all(PairCheck::passed);
            let doc = match cli.format {
                ReportFormat::Json => pretty_json(&json!({
                    "order": order,
                    "pairs": checks
                        .iter()
                        .map(|c| {
                            json!({
                                "forward_worst_rel": c.forward_worst_rel,
                                "inverse_worst_rel": c.inverse_worst_rel,
                                "name": c.name,
                                "passed": c.passed(),
                            })
                        })
                        .collect::<Vec<_>>(),
                    "passed": all_passed,
                })),
                format => {
                    let mut rows = vec![Quantity::plain(
                        "order",
                        order,
                        "inversion order used for the inverse leg",
                    )];
                    for check in &checks {
                        rows.push(Quantity::plain(
                            &format!("{}_forward_rel", check.name),
                            format!("{:.3e}", check.forward_worst_rel),
                            &format!(
                                "worst relative error, quadrature vs closed form (tolerance {FORWARD_TOL:e})"
                            ),
                        ));
                        rows.push(Quantity::plain(
                            &format!("{}_inverse_rel", check.name),
                            format!("{:.3e}", check.inverse_worst_rel),
                            &format!(
                                "worst relative error, inversion vs function (tolerance {INVERSE_TOL:e})"
                            ),
                        ));
                    }
                    rows.push(Quantity::plain(
                        "status",
                        if all_passed { "pass" } else { "fail" },
                        "all pairs within tolerance on both legs",
                    ));
                    rows_to_doc(&rows, format)
                }
            };
            write_doc(cli.out.as_deref(), &doc)?;
            if all_passed {
                Ok(())
            } else {
                Err(CliError::Solver(Error::accuracy(format!(
                    "transform self-test failed at order {order}; see the emitted table"
                ))))
            }
        }
    }
}

fn load_file(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_scenario(&text).map_err(|source| CliError::Scenario {
        path: path.to_owned(),
        source,
    })
}

fn write_doc(out: Option<&Path>, doc: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, doc).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn rows_to_doc(rows: &[Quantity], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => quantities_to_csv(rows),
        _ => quantities_to_human(rows),
    }
}

fn pretty_json(value: &serde_json::Value) -> String {
    let mut doc = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    doc.push('\n');
    doc
}

fn player_name(player: Player) -> &'static str {
    match player {
        Player::A => "A",
        Player::B => "B",
    }
}

fn ratio_string(value: Ratio) -> String {
    if value.denom() == 1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses one hit probability exactly: a plain decimal (`0.35`, `.5`,
/// `1`) becomes the rational with a power-of-ten denominator, so the
/// crossing test `p_a + p_b >= 1` is decided on the written digits.
/// Floating-point parsing gets near-miss sums wrong: `0.1` plus
/// `0.89999999999999999` is below one by exactly `1e-17`, but both
/// round to `f64` values summing to exactly `1.0` — a false crossing.
fn parse_probability(text: &str) -> Result<Ratio, CliError> {
    let trimmed = text.trim();
    let invalid = || {
        CliError::Usage(format!(
            "invalid probability '{trimmed}': expected a plain decimal in [0, 1] \
             with at most 18 fractional digits"
        ))
    };
    let (int_part, frac_part) = match trimmed.split_once('.') {
        Some((int_part, frac_part)) => (int_part, frac_part),
        None => (trimmed, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(invalid());
    }
    if frac_part.len() > 18 {
        return Err(invalid());
    }
    let den = 10_i128.pow(frac_part.len() as u32);
    let int: i128 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| invalid())?
    };
    let frac: i128 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| invalid())?
    };
    let num = int
        .checked_mul(den)
        .and_then(|scaled| scaled.checked_add(frac))
        .ok_or_else(invalid)?;
    let ratio = Ratio::new(num, den);
    if ratio > Ratio::new(1, 1) {
        return Err(invalid());
    }
    Ok(ratio)
}

fn parse_probability_list(texts: &[String]) -> Result<Vec<Ratio>, CliError> {
    texts.iter().map(|text| parse_probability(text)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_parse_exactly() {
        assert_eq!(parse_probability("0.3").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_probability(".5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_probability("1").unwrap(), Ratio::new(1, 1));
        assert_eq!(parse_probability("1.0").unwrap(), Ratio::new(1, 1));
        assert_eq!(
            parse_probability("0.123456789012345678").unwrap(),
            Ratio::new(123_456_789_012_345_678, 1_000_000_000_000_000_000)
        );
    }

    #[test]
    fn exact_parsing_decides_near_miss_sums_f64_gets_wrong() {
        // This pair sums to 1 - 1e-17: not a crossing. Parsed as f64 the
        // second operand rounds to 0.9 and the sum to exactly 1.0, which
        // would misreport a crossing; the rational route sees the digits.
        let a = parse_probability("0.1").unwrap();
        let b = parse_probability("0.89999999999999999").unwrap();
        assert!(a + b < Ratio::new(1, 1));
        let f64_sum = "0.1".parse::<f64>().unwrap() + "0.89999999999999999".parse::<f64>().unwrap();
        assert!(f64_sum >= 1.0);
        // Exact complements are still recognized as crossings.
        let sum = parse_probability("0.3").unwrap() + parse_probability("0.7").unwrap();
        assert_eq!(sum, Ratio::new(1, 1));
    }

    #[test]
    fn malformed_probabilities_are_usage_errors() {
        for bad in ["", ".", "-0.1", "1.5", "0.3e-1", "0,3", "abc", "2"] {
            let err = parse_probability(bad).unwrap_err();
            assert!(matches!(err, CliError::Usage(_)), "{bad}: {err}");
            assert_eq!(err.exit_code(), 1);
        }
        // Nineteen fractional digits would overflow the exact grid.
        assert!(parse_probability("0.1234567890123456789").is_err());
    }

    #[test]
    fn accuracy_errors_exit_two_everything_else_one() {
        assert_eq!(CliError::Solver(Error::accuracy("x")).exit_code(), 2);
        assert_eq!(CliError::Solver(Error::domain("x")).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }

    #[test]
    fn command_line_parses() {
        let cli = Cli::try_parse_from([
            "duel",
            "simulate",
            "--scenario",
            "s.json",
            "--replications",
            "100",
            "--seed",
            "7",
            "--threads",
            "2",
            "--format",
            "json",
        ])
        .unwrap();
        assert!(matches!(cli.format, ReportFormat::Json));
        match cli.command {
            Command::Simulate {
                replications,
                seed,
                threads,
                ..
            } => {
                assert_eq!(replications, Some(100));
                assert_eq!(seed, Some(7));
                assert_eq!(threads, Some(2));
            }
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn classic_duel_flags_split_on_commas() {
        let cli = Cli::try_parse_from([
            "duel",
            "classic-duel",
            "--p-a",
            "0.1,0.3",
            "--p-b",
            "0.5,0.7",
        ])
        .unwrap();
        match cli.command {
            Command::ClassicDuel { p_a, p_b } => {
                assert_eq!(p_a, ["0.1", "0.3"]);
                assert_eq!(p_b, ["0.5", "0.7"]);
            }
            other => panic!("wrong command: {other:?}"),
        }
    }
}
