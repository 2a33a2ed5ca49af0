//! The bundled reference scenario: player A iterates every six time units
//! starting immediately, player B every four units after a five-unit entry
//! delay, and the crossing moment 17.95 ships with the scenario data. A
//! variant keeps the same mean timing but draws the cycles from
//! exponential laws.

use crate::engine::{simulate, DecisionReport, DuelScenario, PlayerSpec};
use crate::renewal::{Distribution, RenewalSpec};

/// Crossing moment supplied with the bundled scenario.
pub const CASE_STUDY_T_STAR: f64 = 17.95;

fn player(delay: f64, cycle: Distribution) -> PlayerSpec {
    PlayerSpec {
        curve: None,
        renewal: RenewalSpec::new(Distribution::Deterministic { value: delay }, cycle)
            .expect("bundled renewal parameters are valid"),
    }
}

/// The bundled deterministic scenario: delays (0, 5), cycles (6, 4),
/// crossing moment supplied directly.
pub fn case_study_scenario() -> DuelScenario {
    DuelScenario::new(
        player(0.0, Distribution::Deterministic { value: 6.0 }),
        player(5.0, Distribution::Deterministic { value: 4.0 }),
        Some(CASE_STUDY_T_STAR),
        None,
    )
    .expect("bundled scenario parameters are valid")
}

/// The stochastic variant: the same delays and mean cycle lengths, with
/// exponentially distributed cycles (rates 1/6 and 1/4).
pub fn case_study_exponential_scenario() -> DuelScenario {
    DuelScenario::new(
        player(0.0, Distribution::Exponential { rate: 1.0 / 6.0 }),
        player(5.0, Distribution::Exponential { rate: 1.0 / 4.0 }),
        Some(CASE_STUDY_T_STAR),
        None,
    )
    .expect("bundled scenario parameters are valid")
}

/// Runs the bundled deterministic scenario and returns its report: every
/// replication is identical, so the result is exact and carries no
/// standard errors.
pub fn run_case_study() -> DecisionReport {
    simulate(&case_study_scenario(), 1, 0).expect("bundled scenario simulates cleanly")
}
