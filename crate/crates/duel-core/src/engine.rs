//! Duel engine: the optimal crossing moment, exit indices on realized
//! paths, and Monte Carlo estimation of the decision quantities.
//!
//! Replication is split into two pure stages so drivers can parallelize
//! freely: [`replicate`] produces one [`RepOutcome`] from `(scenario, seed,
//! index)` alone, and [`aggregate`] folds an index-ordered slice of
//! outcomes into a [`DecisionReport`] with compensated summation. Any
//! partition of the index range onto threads therefore yields bit-identical
//! reports; [`simulate`] is the serial reference driver.

use alloc::vec::Vec;

use crate::curves::SuccessCurve;
use crate::renewal::{sample_path, EpochPath, RenewalSpec};
use crate::rng::Stream;
use crate::{Error, Result};

/// One player: an optional success curve plus the renewal law of their
/// decision epochs.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerSpec {
    /// Success curve; may be absent when the scenario pins `t*` directly.
    pub curve: Option<SuccessCurve>,
    /// Decision-epoch process.
    pub renewal: RenewalSpec,
}

/// A complete two-player duel configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct DuelScenario {
    /// Player A (wins ties).
    pub player_a: PlayerSpec,
    /// Player B.
    pub player_b: PlayerSpec,
    /// Directly pinned crossing moment; required when curves are absent.
    pub t_star_override: Option<f64>,
    /// Exit thresholds `(U, V)`; `None` defaults both to `t*`.
    pub thresholds: Option<(f64, f64)>,
    /// Whether the win event also requires the joint success condition
    /// `P_a(S_mu) + P_b(T_nu) >= 1`. At the default thresholds `(t*, t*)`
    /// the condition holds automatically, so this switch only matters for
    /// custom thresholds; it is forced off when either curve is absent.
    pub enforce_curve_condition: bool,
}

impl DuelScenario {
    /// Builds and validates a scenario. The curve condition is enforced
    /// exactly when both curves are present.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] when neither both curves nor a `t*` override is
    /// available, or when an override/threshold is negative or non-finite.
    pub fn new(
        player_a: PlayerSpec,
        player_b: PlayerSpec,
        t_star_override: Option<f64>,
        thresholds: Option<(f64, f64)>,
    ) -> Result<DuelScenario> {
        let both_curves = player_a.curve.is_some() && player_b.curve.is_some();
        if !both_curves && t_star_override.is_none() {
            return Err(Error::domain(
                "scenario needs either both success curves or an explicit t_star",
            ));
        }
        if let Some(ts) = t_star_override {
            if !ts.is_finite() || ts < 0.0 {
                return Err(Error::domain("t_star must be finite and >= 0"));
            }
        }
        if let Some((u, v)) = thresholds {
            if !u.is_finite() || !v.is_finite() || u < 0.0 || v < 0.0 {
                return Err(Error::domain("thresholds must be finite and >= 0"));
            }
        }
        Ok(DuelScenario {
            enforce_curve_condition: both_curves,
            player_a,
            player_b,
            t_star_override,
            thresholds,
        })
    }

    /// The crossing moment: the override when present, otherwise computed
    /// from the two curves to absolute tolerance `1e-9`.
    pub fn resolve_t_star(&self) -> Result<f64> {
        if let Some(ts) = self.t_star_override {
            return Ok(ts);
        }
        match (&self.player_a.curve, &self.player_b.curve) {
            (Some(a), Some(b)) => compute_t_star(a, b, 1e-9),
            _ => Err(Error::domain(
                "scenario needs either both success curves or an explicit t_star",
            )),
        }
    }

    /// The exit thresholds `(U, V)`, defaulting to `(t*, t*)`.
    pub fn resolve_thresholds(&self) -> Result<(f64, f64)> {
        match self.thresholds {
            Some(uv) => Ok(uv),
            None => {
                let ts = self.resolve_t_star()?;
                Ok((ts, ts))
            }
        }
    }

    /// True when every duration in the scenario is deterministic, so a
    /// single replication already gives exact values.
    pub fn is_fully_deterministic(&self) -> bool {
        let a = &self.player_a.renewal;
        let b = &self.player_b.renewal;
        a.initial_delay.is_deterministic()
            && a.cycle.is_deterministic()
            && b.initial_delay.is_deterministic()
            && b.cycle.is_deterministic()
    }
}

/// Exit data of one realized path against one threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExitRecord {
    /// Exit index: smallest `j` with `path[j] >= threshold`.
    pub index: usize,
    /// Epoch at the exit index.
    pub exit_time: f64,
    /// Epoch one before the exit index; 0 when the exit index is 0.
    pub pre_exit_time: f64,
}

/// Smallest `t >= 0` where the curves' success probabilities sum to at
/// least 1, found by bracketing plus bisection to absolute tolerance `tol`.
///
/// Returns 0 immediately when the condition already holds at the origin.
///
/// # Errors
///
/// [`Error::Domain`] for a non-positive tolerance; [`Error::NoCrossing`]
/// when the sum stays below 1 over both curves' horizons.
pub fn compute_t_star(curve_a: &SuccessCurve, curve_b: &SuccessCurve, tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let gap = |t: f64| -> f64 {
        // Times handed to eval are >= 0 by construction here.
        curve_a.eval(t).unwrap_or(0.0) + curve_b.eval(t).unwrap_or(0.0) - 1.0
    };
    if gap(0.0) >= 0.0 {
        return Ok(0.0);
    }
    // Bracket the crossing: within the common finite horizon when one
    // exists, otherwise by doubling (capped; curves that genuinely
    // approach a sum >= 1 cross long before the cap).
    let horizon = match (curve_a.t_max(), curve_b.t_max()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    let mut lo = 0.0;
    let mut hi = match horizon {
        Some(h) => {
            if gap(h) < 0.0 {
                return Err(Error::NoCrossing);
            }
            h
        }
        None => {
            let mut hi = 1.0;
            while gap(hi) < 0.0 {
                hi *= 2.0;
                if hi > 1e18 {
                    return Err(Error::NoCrossing);
                }
            }
            hi
        }
    };
    // Bisection; the interval always keeps gap(lo) < 0 <= gap(hi).
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        if gap(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exit record of `path` against `threshold`.
///
/// # Errors
///
/// [`Error::InsufficientPath`] when the path ends below the threshold.
pub fn exit_index(path: &EpochPath, threshold: f64) -> Result<ExitRecord> {
    let times = &path.times;
    match times.iter().position(|&t| t >= threshold) {
        Some(index) => Ok(ExitRecord {
            index,
            exit_time: times[index],
            pre_exit_time: if index == 0 { 0.0 } else { times[index - 1] },
        }),
        None => Err(Error::InsufficientPath),
    }
}

/// Outcome of a single replication.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepOutcome {
    /// Player A's exit record against threshold `U`.
    pub a: ExitRecord,
    /// Player B's exit record against threshold `V`.
    pub b: ExitRecord,
    /// Trace event: `S_mu <= T_nu` (ties to A) and, when enforced, the
    /// joint success condition.
    pub win_a: bool,
}

/// Runs one replication. Pure in `(scenario, t_star-resolved thresholds,
/// seed, replication index)`: the same inputs give the same outcome on any
/// thread.
///
/// # Errors
///
/// Degenerate renewal errors from path sampling.
pub fn replicate(
    scenario: &DuelScenario,
    thresholds: (f64, f64),
    seed: u64,
    replication: u64,
) -> Result<RepOutcome> {
    let (u, v) = thresholds;
    let horizon = u.max(v);
    let mut stream = Stream::for_replication(seed, replication);
    let path_a = sample_path(&scenario.player_a.renewal, horizon, &mut stream)?;
    let path_b = sample_path(&scenario.player_b.renewal, horizon, &mut stream)?;
    let a = exit_index(&path_a, u)?;
    let b = exit_index(&path_b, v)?;
    let mut win_a = a.exit_time <= b.exit_time;
    if win_a && scenario.enforce_curve_condition {
        if let (Some(ca), Some(cb)) = (&scenario.player_a.curve, &scenario.player_b.curve) {
            win_a = ca.eval(a.exit_time)? + cb.eval(b.exit_time)? >= 1.0;
        }
    }
    Ok(RepOutcome { a, b, win_a })
}

/// How a report's values were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportMode {
    /// Exact arithmetic on deterministic durations.
    Deterministic,
    /// Monte Carlo estimates with standard errors.
    MonteCarlo,
    /// Closed-form/transform evaluation.
    Analytic,
}

impl ReportMode {
    /// Stable lowercase label (used by report emitters).
    pub fn label(self) -> &'static str {
        match self {
            ReportMode::Deterministic => "deterministic",
            ReportMode::MonteCarlo => "monte-carlo",
            ReportMode::Analytic => "analytic",
        }
    }
}

/// A point estimate with optional sampling error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimEstimate {
    /// Estimated (or exact) value.
    pub mean: f64,
    /// Standard error of the mean; absent for exact values.
    pub std_error: Option<f64>,
    /// Number of replications behind the estimate.
    pub replications: u64,
}

/// Exit-time estimates for both players over one event class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    /// `E[S_mu]` — player A's exit time.
    pub e_s_mu: SimEstimate,
    /// `E[S_(mu-1)]` — player A's pre-exit time.
    pub e_s_pre: SimEstimate,
    /// `E[T_nu]` — player B's exit time.
    pub e_t_nu: SimEstimate,
    /// `E[T_(nu-1)]` — player B's pre-exit time.
    pub e_t_pre: SimEstimate,
}

/// Full decision summary (the report emitted by every mode).
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionReport {
    /// Crossing moment used by the run.
    pub t_star: f64,
    /// Exit thresholds `(U, V)`.
    pub thresholds: (f64, f64),
    /// Production mode of the values.
    pub mode: ReportMode,
    /// Replication count (1 in deterministic mode).
    pub replications: u64,
    /// Player A's iteration count from the floor rule.
    pub mu: i64,
    /// Player B's iteration count from the floor rule.
    pub nu: i64,
    /// Unconditional exit-time moments.
    pub unconditional: MomentSet,
    /// Moments conditional on the trace (win) event; absent if it never
    /// occurred.
    pub conditional_on_win: Option<MomentSet>,
    /// Probability that player A exits first (ties to A).
    pub win_prob_a: SimEstimate,
}

/// Iteration count implied by an expected exit time: completed cycles
/// after the initial delay, `floor((E[exit] - E[delay]) / E[cycle])`,
/// with a tiny guard so exact integer ratios are not floored down by
/// floating-point noise.
pub fn iteration_count(mean_exit: f64, mean_delay: f64, mean_cycle: f64) -> i64 {
    if mean_cycle <= 0.0 {
        return 0;
    }
    libm::floor((mean_exit - mean_delay) / mean_cycle + 1e-9) as i64
}

/// Kahan-compensated sum of `values` mapped through `f`.
fn compensated_sum(outcomes: &[RepOutcome], f: impl Fn(&RepOutcome) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for outcome in outcomes {
        let y = f(outcome) - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Mean and standard error over a filtered subset, by compensated two-pass
/// summation in index order (bit-stable under any thread partitioning of
/// the outcome production).
fn estimate(
    outcomes: &[RepOutcome],
    keep: impl Fn(&RepOutcome) -> bool + Copy,
    value: impl Fn(&RepOutcome) -> f64 + Copy,
    exact: bool,
) -> Option<SimEstimate> {
    let n = outcomes.iter().filter(|o| keep(o)).count() as u64;
    if n == 0 {
        return None;
    }
    let masked = |f: &dyn Fn(&RepOutcome) -> f64, o: &RepOutcome| if keep(o) { f(o) } else { 0.0 };
    let mean = compensated_sum(outcomes, |o| masked(&value, o)) / n as f64;
    let std_error = if exact || n < 2 {
        if exact {
            None
        } else {
            Some(0.0)
        }
    } else {
        let ss = compensated_sum(outcomes, |o| {
            if keep(o) {
                let d = value(o) - mean;
                d * d
            } else {
                0.0
            }
        });
        Some(libm::sqrt(ss / ((n - 1) as f64 * n as f64)))
    };
    Some(SimEstimate {
        mean,
        std_error,
        replications: n,
    })
}

fn moment_set(
    outcomes: &[RepOutcome],
    keep: impl Fn(&RepOutcome) -> bool + Copy,
    exact: bool,
) -> Option<MomentSet> {
    Some(MomentSet {
        e_s_mu: estimate(outcomes, keep, |o| o.a.exit_time, exact)?,
        e_s_pre: estimate(outcomes, keep, |o| o.a.pre_exit_time, exact)?,
        e_t_nu: estimate(outcomes, keep, |o| o.b.exit_time, exact)?,
        e_t_pre: estimate(outcomes, keep, |o| o.b.pre_exit_time, exact)?,
    })
}

/// Folds an index-ordered slice of outcomes into a report.
///
/// Always processes outcomes in slice order with compensated summation, so
/// the result is independent of how the slice was produced.
pub fn aggregate(
    scenario: &DuelScenario,
    t_star: f64,
    thresholds: (f64, f64),
    mode: ReportMode,
    outcomes: &[RepOutcome],
) -> DecisionReport {
    let exact = mode == ReportMode::Deterministic;
    let n = outcomes.len() as u64;
    let unconditional = moment_set(outcomes, |_| true, exact).expect("at least one replication");
    let conditional_on_win = moment_set(outcomes, |o| o.win_a, exact);
    let wins = outcomes.iter().filter(|o| o.win_a).count();
    let win_prob_a = estimate(
        outcomes,
        |_| true,
        |o| if o.win_a { 1.0 } else { 0.0 },
        exact,
    )
    .expect("at least one replication");
    debug_assert_eq!(wins as u64 + outcomes.iter().filter(|o| !o.win_a).count() as u64, n);
    let mu = iteration_count(
        unconditional.e_s_mu.mean,
        scenario.player_a.renewal.initial_delay.mean(),
        scenario.player_a.renewal.mean_cycle(),
    );
    let nu = iteration_count(
        unconditional.e_t_nu.mean,
        scenario.player_b.renewal.initial_delay.mean(),
        scenario.player_b.renewal.mean_cycle(),
    );
    DecisionReport {
        t_star,
        thresholds,
        mode,
        replications: n,
        mu,
        nu,
        unconditional,
        conditional_on_win,
        win_prob_a,
    }
}

/// Serial Monte Carlo run: `replications` independent replications of the
/// scenario under `seed`, aggregated in index order.
///
/// Fully deterministic scenarios report in deterministic mode (exact
/// values, one replication, no standard errors) regardless of the
/// requested count, since every replication would be identical.
///
/// # Errors
///
/// [`Error::Domain`] for zero replications; scenario resolution and path
/// sampling errors.
pub fn simulate(scenario: &DuelScenario, replications: u64, seed: u64) -> Result<DecisionReport> {
    if replications == 0 {
        return Err(Error::domain("at least one replication is required"));
    }
    let t_star = scenario.resolve_t_star()?;
    let thresholds = scenario.resolve_thresholds()?;
    let (mode, reps) = if scenario.is_fully_deterministic() {
        (ReportMode::Deterministic, 1)
    } else {
        (ReportMode::MonteCarlo, replications)
    };
    let mut outcomes = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        outcomes.push(replicate(scenario, thresholds, seed, rep)?);
    }
    Ok(aggregate(scenario, t_star, thresholds, mode, &outcomes))
}
