//! Decision-report emission: one table in three encodings — an aligned
//! human-readable layout (parameter, value, description), a key-stable JSON
//! document, and CSV with one row per quantity.

use std::fmt::Write as _;

use duel_core::engine::{DecisionReport, MomentSet, ReportMode, SimEstimate};
use serde::{Deserialize, Serialize};

/// Output encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    /// Aligned `parameter  value  description` rows.
    Human,
    /// Key-stable JSON document.
    Json,
    /// `quantity,mean,std_error,replications` rows.
    Csv,
}

/// JSON form of a point estimate (`std_error` is `null` for exact values).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonEstimate {
    /// Estimated (or exact) value.
    pub mean: f64,
    /// Standard error of the mean; `null` when exact.
    pub std_error: Option<f64>,
    /// Replications behind the estimate.
    pub replications: u64,
}

impl From<&SimEstimate> for JsonEstimate {
    fn from(estimate: &SimEstimate) -> JsonEstimate {
        JsonEstimate {
            mean: estimate.mean,
            std_error: estimate.std_error,
            replications: estimate.replications,
        }
    }
}

/// JSON form of the four exit-time moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonMoments {
    /// `E[S_mu]` — player A's exit moment.
    pub e_s_mu: JsonEstimate,
    /// `E[S_mu-1]` — player A's last epoch before exit.
    pub e_s_pre: JsonEstimate,
    /// `E[T_nu]` — player B's exit moment.
    pub e_t_nu: JsonEstimate,
    /// `E[T_nu-1]` — player B's last epoch before exit.
    pub e_t_pre: JsonEstimate,
}

impl From<&MomentSet> for JsonMoments {
    fn from(set: &MomentSet) -> JsonMoments {
        JsonMoments {
            e_s_mu: (&set.e_s_mu).into(),
            e_s_pre: (&set.e_s_pre).into(),
            e_t_nu: (&set.e_t_nu).into(),
            e_t_pre: (&set.e_t_pre).into(),
        }
    }
}

/// The full report as emitted in JSON; field order here is the key order on
/// the wire, and parsing an emitted document reproduces the values exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    /// Unit label of every time-valued quantity; `null` when unknown.
    pub time_unit: Option<String>,
    /// How the values were produced.
    pub mode: String,
    /// Crossing moment `t*`.
    pub t_star: f64,
    /// Player A's exit threshold.
    pub threshold_a: f64,
    /// Player B's exit threshold.
    pub threshold_b: f64,
    /// Replication count of the run.
    pub replications: u64,
    /// Player A's iteration count at exit.
    pub mu: i64,
    /// Player B's iteration count at exit.
    pub nu: i64,
    /// Probability that player A exits first (ties to A).
    pub win_prob_a: JsonEstimate,
    /// Moments over all replications.
    pub unconditional: JsonMoments,
    /// Moments over replications where A won; `null` if A never won.
    pub conditional_on_win: Option<JsonMoments>,
}

impl JsonReport {
    /// Builds the JSON mirror of a report.
    pub fn from_report(report: &DecisionReport, time_unit: Option<&str>) -> JsonReport {
        JsonReport {
            time_unit: time_unit.map(str::to_owned),
            mode: report.mode.label().to_owned(),
            t_star: report.t_star,
            threshold_a: report.thresholds.0,
            threshold_b: report.thresholds.1,
            replications: report.replications,
            mu: report.mu,
            nu: report.nu,
            win_prob_a: (&report.win_prob_a).into(),
            unconditional: (&report.unconditional).into(),
            conditional_on_win: report.conditional_on_win.as_ref().map(Into::into),
        }
    }
}

/// One row of a quantity table (the human and CSV encodings).
pub struct Quantity {
    /// Row label.
    pub name: String,
    /// Value (the `mean` column in CSV).
    pub value: String,
    /// Standard error, when the value is a sampling estimate.
    pub std_error: Option<f64>,
    /// Replications behind the value, when meaningful.
    pub replications: Option<u64>,
    /// Human-format description cell.
    pub description: String,
}

impl Quantity {
    /// A plain (exact, replication-free) row.
    pub fn plain(name: &str, value: impl ToString, description: &str) -> Quantity {
        Quantity {
            name: name.to_owned(),
            value: value.to_string(),
            std_error: None,
            replications: None,
            description: description.to_owned(),
        }
    }

    /// A row carrying a point estimate.
    pub fn estimate(name: &str, estimate: &SimEstimate, description: &str) -> Quantity {
        Quantity {
            name: name.to_owned(),
            value: estimate.mean.to_string(),
            std_error: estimate.std_error,
            replications: Some(estimate.replications),
            description: description.to_owned(),
        }
    }
}

/// Renders quantity rows as an aligned human table.
pub fn quantities_to_human(rows: &[Quantity]) -> String {
    let name_width = rows
        .iter()
        .map(|r| r.name.len())
        .chain(["parameter".len()])
        .max()
        .unwrap_or(0);
    let value_width = rows
        .iter()
        .map(|r| r.value.len())
        .chain(["value".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}  {:<value_width$}  description",
        "parameter", "value"
    );
    for row in rows {
        let mut description = row.description.clone();
        if let Some(se) = row.std_error {
            if se > 0.0 {
                let _ = write!(description, " (std error {se:.3e})");
            }
        }
        let _ = writeln!(
            out,
            "{:<name_width$}  {:<value_width$}  {}",
            row.name, row.value, description
        );
    }
    out
}

/// Renders quantity rows as CSV (`std_error` empty for exact rows).
pub fn quantities_to_csv(rows: &[Quantity]) -> String {
    let mut out = String::from("quantity,mean,std_error,replications\n");
    for row in rows {
        let se = row.std_error.map(|s| s.to_string()).unwrap_or_default();
        let reps = row.replications.map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", row.name, row.value, se, reps);
    }
    out
}

fn moment_rows(rows: &mut Vec<Quantity>, set: &MomentSet, suffix: &str, label: &str) {
    rows.push(Quantity::estimate(
        &format!("E[S_mu]{suffix}"),
        &set.e_s_mu,
        &format!("expected exit moment of player A{label}"),
    ));
    rows.push(Quantity::estimate(
        &format!("E[S_mu-1]{suffix}"),
        &set.e_s_pre,
        &format!("player A's expected last epoch before exit{label}"),
    ));
    rows.push(Quantity::estimate(
        &format!("E[T_nu]{suffix}"),
        &set.e_t_nu,
        &format!("expected exit moment of player B{label}"),
    ));
    rows.push(Quantity::estimate(
        &format!("E[T_nu-1]{suffix}"),
        &set.e_t_pre,
        &format!("player B's expected last epoch before exit{label}"),
    ));
}

/// The report as quantity rows (shared by the human and CSV encodings).
fn report_rows(report: &DecisionReport, time_unit: Option<&str>) -> Vec<Quantity> {
    let mut rows = Vec::new();
    if let Some(unit) = time_unit {
        rows.push(Quantity::plain(
            "time_unit",
            unit,
            "unit of every time-valued row",
        ));
    }
    rows.push(Quantity::plain(
        "mode",
        report.mode.label(),
        "how the values were produced",
    ));
    rows.push(Quantity::plain(
        "replications",
        report.replications,
        "independent replications behind the estimates",
    ));
    rows.push(Quantity::plain(
        "t_star",
        report.t_star,
        "optimal crossing moment of the success curves",
    ));
    rows.push(Quantity::plain(
        "threshold_a",
        report.thresholds.0,
        "player A exits at the first epoch at or past this",
    ));
    rows.push(Quantity::plain(
        "threshold_b",
        report.thresholds.1,
        "player B exits at the first epoch at or past this",
    ));
    rows.push(Quantity::plain(
        "mu",
        report.mu,
        "completed decision cycles of player A at exit",
    ));
    rows.push(Quantity::plain(
        "nu",
        report.nu,
        "completed decision cycles of player B at exit",
    ));
    moment_rows(&mut rows, &report.unconditional, "", "");
    rows.push(Quantity::estimate(
        "win_prob_a",
        &report.win_prob_a,
        "probability that player A exits first (ties to A)",
    ));
    if report.mode != ReportMode::Deterministic {
        if let Some(conditional) = &report.conditional_on_win {
            moment_rows(&mut rows, conditional, " | A wins", ", given that A wins");
        }
    }
    rows
}

/// Renders a report in the requested format, labelling time rows with the
/// scenario's unit when one is known.
pub fn emit_report_with_unit(
    report: &DecisionReport,
    format: ReportFormat,
    time_unit: Option<&str>,
) -> String {
    match format {
        ReportFormat::Human => quantities_to_human(&report_rows(report, time_unit)),
        ReportFormat::Csv => {
            // The unit is a label, not a quantity; it has no CSV row.
            quantities_to_csv(&report_rows(report, None))
        }
        ReportFormat::Json => {
            let mut doc = serde_json::to_string_pretty(&JsonReport::from_report(report, time_unit))
                .expect("reports always serialize");
            doc.push('\n');
            doc
        }
    }
}

/// Renders a report with no unit label.
pub fn emit_report(report: &DecisionReport, format: ReportFormat) -> String {
    emit_report_with_unit(report, format, None)
}
