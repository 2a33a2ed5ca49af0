//! First moments of the exit and pre-exit times, extracted from the joint
//! functional by one-sided finite differences in each argument slot, with
//! Richardson extrapolation and a step-halving stability check.

use crate::engine::{DecisionReport, DuelScenario, MomentSet, ReportMode, SimEstimate};
use crate::functional::phi_functional;
use crate::renewal::Distribution;
use crate::transform::TransformArgs;
use crate::{Error, Result};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 2e-3;

/// Relative disagreement between the full- and half-step derivative
/// estimates above which the result is rejected as unstable.
pub const STABILITY_LIMIT: f64 = 1e-3;

/// Smallest win probability the conditional moments will divide by.
const MIN_WIN_PROBABILITY: f64 = 1e-12;

/// Argument slot of the joint functional to differentiate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentSlot {
    /// Player A's pre-exit time.
    PreExitA,
    /// Player A's exit time.
    ExitA,
    /// Player B's pre-exit time.
    PreExitB,
    /// Player B's exit time.
    ExitB,
}

impl MomentSlot {
    fn args(self, x: f64) -> TransformArgs {
        let mut args = TransformArgs::ZERO;
        match self {
            MomentSlot::PreExitA => args.theta0 = x,
            MomentSlot::ExitA => args.theta1 = x,
            MomentSlot::PreExitB => args.vartheta0 = x,
            MomentSlot::ExitB => args.vartheta1 = x,
        }
        args
    }
}

/// One extracted moment with its stability diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlotMoment {
    /// Conditional mean given a win, `E[X | win]`.
    pub conditional: f64,
    /// Win-weighted mean `E[X; win]` (not divided by the win probability).
    pub weighted: f64,
    /// Relative gap between the full- and half-step derivative estimates.
    pub stability: f64,
}

/// One-sided three-point derivative of the functional in `slot` at zero,
/// using step `h`.
fn one_sided_derivative(
    scenario: &DuelScenario,
    t_star: f64,
    slot: MomentSlot,
    phi0: f64,
    h: f64,
) -> Result<f64> {
    let phi_h = phi_functional(scenario, &slot.args(h), t_star)?;
    let phi_2h = phi_functional(scenario, &slot.args(2.0 * h), t_star)?;
    Ok((-3.0 * phi0 + 4.0 * phi_h - phi_2h) / (2.0 * h))
}

/// Extracts `E[X | win]` for the time in `slot` by finite differences with
/// step `h`, Richardson-extrapolating the full- and half-step estimates.
///
/// # Errors
///
/// [`Error::Domain`] for an invalid step; [`Error::Accuracy`] when the two
/// step sizes disagree beyond [`STABILITY_LIMIT`] or the win probability is
/// below the conditioning floor; plus any error from the functional.
pub fn conditional_moment(
    scenario: &DuelScenario,
    t_star: f64,
    slot: MomentSlot,
    h: f64,
) -> Result<SlotMoment> {
    if !h.is_finite() || h <= 0.0 || h > 0.1 {
        return Err(Error::domain("finite-difference step must be in (0, 0.1]"));
    }
    let phi0 = phi_functional(scenario, &TransformArgs::ZERO, t_star)?;
    if phi0 < MIN_WIN_PROBABILITY {
        return Err(Error::accuracy(alloc::format!(
            "win probability {phi0:.3e} too small to condition on"
        )));
    }
    let full = one_sided_derivative(scenario, t_star, slot, phi0, h)?;
    let half = one_sided_derivative(scenario, t_star, slot, phi0, 0.5 * h)?;
    let richardson = (4.0 * half - full) / 3.0;
    let stability = (half - full).abs() / richardson.abs().max(1e-12);
    if stability > STABILITY_LIMIT {
        return Err(Error::accuracy(alloc::format!(
            "derivative unstable in step halving: relative gap {stability:.3e}"
        )));
    }
    let weighted = -richardson;
    Ok(SlotMoment {
        conditional: weighted / phi0,
        weighted,
        stability,
    })
}

/// Mean of one player's exit time regardless of the duel outcome.
fn marginal_exit_mean(delay: f64, cycle: &Distribution, threshold: f64) -> f64 {
    if delay >= threshold {
        return delay;
    }
    match cycle {
        Distribution::Deterministic { value } => {
            let m = libm::ceil((threshold - delay) / value);
            let m = if delay + (m - 1.0) * value >= threshold {
                m - 1.0
            } else if delay + m * value < threshold {
                m + 1.0
            } else {
                m
            };
            delay + m * value
        }
        Distribution::Exponential { rate } => threshold + 1.0 / rate,
    }
}

/// Mean of one player's pre-exit time regardless of the duel outcome. For
/// an exponential cycle the gap back from the threshold is an exponential
/// clock capped at the post-delay span.
fn marginal_pre_mean(delay: f64, cycle: &Distribution, threshold: f64) -> f64 {
    if delay >= threshold {
        return 0.0;
    }
    match cycle {
        Distribution::Deterministic { value } => {
            marginal_exit_mean(delay, cycle, threshold) - value
        }
        Distribution::Exponential { rate } => {
            threshold - (1.0 - libm::exp(-rate * (threshold - delay))) / rate
        }
    }
}

fn exact_estimate(mean: f64) -> SimEstimate {
    SimEstimate {
        mean,
        std_error: None,
        replications: 0,
    }
}

fn det_delay_value(dist: &Distribution) -> Result<f64> {
    match dist {
        Distribution::Deterministic { value } => Ok(*value),
        Distribution::Exponential { .. } => Err(Error::analytic_unavailable(
            "closed-form moments require deterministic initial delays; use simulation",
        )),
    }
}

/// Full analytic decision report: win probability, conditional and
/// marginal first moments, and the implied per-player iteration counts,
/// all derived from the closed-form functional at the resolved threshold.
///
/// # Errors
///
/// Everything [`conditional_moment`] can return, plus
/// [`Error::AnalyticUnavailable`] when the scenario sets unequal
/// thresholds (the functional is evaluated at a single crossing moment).
pub fn moments(scenario: &DuelScenario, h: f64) -> Result<DecisionReport> {
    let t_star = scenario.resolve_t_star()?;
    let (za, zb) = scenario.resolve_thresholds()?;
    if za != zb {
        return Err(Error::analytic_unavailable(
            "closed-form moments require equal thresholds; use simulation",
        ));
    }
    let threshold = za;

    let phi0 = phi_functional(scenario, &TransformArgs::ZERO, threshold)?;
    if phi0 < MIN_WIN_PROBABILITY {
        return Err(Error::accuracy(alloc::format!(
            "win probability {phi0:.3e} too small to condition on"
        )));
    }

    let s_pre = conditional_moment(scenario, threshold, MomentSlot::PreExitA, h)?;
    let s_exit = conditional_moment(scenario, threshold, MomentSlot::ExitA, h)?;
    let t_pre = conditional_moment(scenario, threshold, MomentSlot::PreExitB, h)?;
    let t_exit = conditional_moment(scenario, threshold, MomentSlot::ExitB, h)?;

    let renewal_a = &scenario.player_a.renewal;
    let renewal_b = &scenario.player_b.renewal;
    let delay_a = det_delay_value(&renewal_a.initial_delay)?;
    let delay_b = det_delay_value(&renewal_b.initial_delay)?;

    let unconditional = MomentSet {
        e_s_mu: exact_estimate(marginal_exit_mean(delay_a, &renewal_a.cycle, threshold)),
        e_s_pre: exact_estimate(marginal_pre_mean(delay_a, &renewal_a.cycle, threshold)),
        e_t_nu: exact_estimate(marginal_exit_mean(delay_b, &renewal_b.cycle, threshold)),
        e_t_pre: exact_estimate(marginal_pre_mean(delay_b, &renewal_b.cycle, threshold)),
    };
    let conditional = MomentSet {
        e_s_mu: exact_estimate(s_exit.conditional),
        e_s_pre: exact_estimate(s_pre.conditional),
        e_t_nu: exact_estimate(t_exit.conditional),
        e_t_pre: exact_estimate(t_pre.conditional),
    };

    // Same rule and same (unconditional) mean the simulation aggregator
    // feeds it, so the two modes report identical iteration counts.
    let mu = crate::engine::iteration_count(
        unconditional.e_s_mu.mean,
        renewal_a.initial_delay.mean(),
        renewal_a.mean_cycle(),
    );
    let nu = crate::engine::iteration_count(
        unconditional.e_t_nu.mean,
        renewal_b.initial_delay.mean(),
        renewal_b.mean_cycle(),
    );

    Ok(DecisionReport {
        t_star,
        thresholds: (za, zb),
        mode: ReportMode::Analytic,
        replications: 0,
        mu,
        nu,
        unconditional,
        conditional_on_win: Some(conditional),
        win_prob_a: exact_estimate(phi0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PlayerSpec;
    use crate::renewal::RenewalSpec;

    const T_STAR: f64 = 17.95;

    fn det(value: f64) -> Distribution {
        Distribution::Deterministic { value }
    }

    fn exp_law(rate: f64) -> Distribution {
        Distribution::Exponential { rate }
    }

    fn scenario(
        delay_a: Distribution,
        cycle_a: Distribution,
        delay_b: Distribution,
        cycle_b: Distribution,
    ) -> DuelScenario {
        DuelScenario::new(
            PlayerSpec {
                curve: None,
                renewal: RenewalSpec::new(delay_a, cycle_a).unwrap(),
            },
            PlayerSpec {
                curve: None,
                renewal: RenewalSpec::new(delay_b, cycle_b).unwrap(),
            },
            Some(T_STAR),
            None,
        )
        .unwrap()
    }

    fn case_study_det() -> DuelScenario {
        scenario(det(0.0), det(6.0), det(5.0), det(4.0))
    }

    fn case_study_exp() -> DuelScenario {
        scenario(det(0.0), exp_law(1.0 / 6.0), det(5.0), exp_law(1.0 / 4.0))
    }

    #[test]
    fn deterministic_lattice_moments_are_exact() {
        let report = moments(&case_study_det(), DEFAULT_STEP).unwrap();
        let cond = report.conditional_on_win.unwrap();
        // The one-sided stencil leaves an O(t^4 h^3) residual after
        // Richardson extrapolation: ~2e-4 at times near 20 with h = 2e-3.
        assert!((cond.e_s_pre.mean - 12.0).abs() < 1e-3);
        assert!((cond.e_s_mu.mean - 18.0).abs() < 1e-3);
        assert!((cond.e_t_pre.mean - 17.0).abs() < 1e-3);
        assert!((cond.e_t_nu.mean - 21.0).abs() < 1e-3);
        assert_eq!(report.win_prob_a.mean, 1.0);
        assert_eq!((report.mu, report.nu), (3, 4));
        // Winning is certain, so the marginals coincide with the
        // conditional values exactly.
        assert_eq!(report.unconditional.e_s_mu.mean, 18.0);
        assert_eq!(report.unconditional.e_t_nu.mean, 21.0);
        assert_eq!(report.unconditional.e_s_pre.mean, 12.0);
        assert_eq!(report.unconditional.e_t_pre.mean, 17.0);
    }

    #[test]
    fn exponential_cycle_moments_match_closed_forms() {
        let report = moments(&case_study_exp(), DEFAULT_STEP).unwrap();
        let cond = report.conditional_on_win.unwrap();
        assert!((report.win_prob_a.mean - 0.4).abs() < 1e-14);
        assert!(
            (cond.e_s_mu.mean - 20.35).abs() < 5e-4,
            "E[S_exit | win] = {}",
            cond.e_s_mu.mean
        );
        assert!(
            (cond.e_t_nu.mean - 24.35).abs() < 5e-4,
            "E[T_exit | win] = {}",
            cond.e_t_nu.mean
        );
        assert!(
            (cond.e_s_pre.mean - 12.251_222_164_803_573).abs() < 5e-4,
            "E[S_pre | win] = {}",
            cond.e_s_pre.mean
        );
        assert!(
            (cond.e_t_pre.mean - 14.107_047_709_303_839).abs() < 5e-4,
            "E[T_pre | win] = {}",
            cond.e_t_pre.mean
        );
        assert_eq!((report.mu, report.nu), (3, 4));

        // The win event only involves the overshoots, so conditioning does
        // not move the pre-exit means: marginal and conditional agree.
        assert!(
            (report.unconditional.e_s_pre.mean - cond.e_s_pre.mean).abs() < 5e-4
        );
        assert!(
            (report.unconditional.e_t_pre.mean - cond.e_t_pre.mean).abs() < 5e-4
        );
        // Exit marginals do move: the unbiased overshoot means add on.
        assert!((report.unconditional.e_s_mu.mean - 23.95).abs() < 1e-12);
        assert!((report.unconditional.e_t_nu.mean - 21.95).abs() < 1e-12);
    }

    #[test]
    fn mixed_cycle_moments_match_closed_forms() {
        // Deterministic A, exponential B.
        let report = moments(
            &scenario(det(0.0), det(6.0), det(5.0), exp_law(1.0 / 4.0)),
            DEFAULT_STEP,
        )
        .unwrap();
        let cond = report.conditional_on_win.unwrap();
        assert!((report.win_prob_a.mean - (-0.0125_f64).exp()).abs() < 1e-14);
        assert!((cond.e_s_mu.mean - 18.0).abs() < 1e-3);
        assert!(
            (cond.e_t_nu.mean - 22.0).abs() < 5e-4,
            "E[T_exit | win] = {}",
            cond.e_t_nu.mean
        );
        assert_eq!((report.mu, report.nu), (3, 4));

        // Exponential A, deterministic B.
        let report = moments(
            &scenario(det(0.0), exp_law(1.0 / 6.0), det(5.0), det(4.0)),
            DEFAULT_STEP,
        )
        .unwrap();
        let cond = report.conditional_on_win.unwrap();
        assert!((report.win_prob_a.mean - 0.398_502_760_737_871_2).abs() < 1e-14);
        assert!(
            (cond.e_s_mu.mean - 19.346_351_642_953_256).abs() < 5e-4,
            "E[S_exit | win] = {}",
            cond.e_s_mu.mean
        );
        assert_eq!((report.mu, report.nu), (3, 4));
    }

    #[test]
    fn stability_diagnostic_stays_small_on_smooth_scenarios() {
        for slot in [
            MomentSlot::PreExitA,
            MomentSlot::ExitA,
            MomentSlot::PreExitB,
            MomentSlot::ExitB,
        ] {
            let m = conditional_moment(&case_study_exp(), T_STAR, slot, DEFAULT_STEP).unwrap();
            assert!(
                m.stability < 1e-3,
                "slot {slot:?} stability {}",
                m.stability
            );
            assert!(m.weighted > 0.0 && m.conditional > m.weighted);
        }
    }

    #[test]
    fn impossible_win_is_rejected() {
        // B's delay alone exits at 5 while A cannot exit before 17.95.
        let s = scenario(det(0.0), exp_law(1.0 / 6.0), det(5.0), det(1000.0));
        let err = moments(&s, DEFAULT_STEP).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)), "{err}");
    }

    #[test]
    fn exponential_delay_is_unavailable() {
        let s = scenario(exp_law(0.5), exp_law(1.0 / 6.0), det(5.0), exp_law(1.0 / 4.0));
        let err = moments(&s, DEFAULT_STEP).unwrap_err();
        assert!(matches!(err, Error::AnalyticUnavailable(_)));
    }

    #[test]
    fn step_validation() {
        let s = case_study_exp();
        assert!(conditional_moment(&s, T_STAR, MomentSlot::ExitA, 0.0).is_err());
        assert!(conditional_moment(&s, T_STAR, MomentSlot::ExitA, -1e-3).is_err());
        assert!(conditional_moment(&s, T_STAR, MomentSlot::ExitA, 0.5).is_err());
    }
}
