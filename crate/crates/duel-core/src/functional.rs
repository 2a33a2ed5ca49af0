//! The joint exit functional
//! `Phi(args) = E[e^{-theta0 S_pre - theta1 S_exit - vartheta0 T_pre - vartheta1 T_exit}; A wins]`
//! evaluated along three routes: a closed form built from the renewal
//! structure at the threshold, a coupled two-variable transform inverted
//! numerically, and a factorized transform retained for cross-checks.

use alloc::format;

use crate::dd::Dd;
use crate::engine::DuelScenario;
use crate::laplace::{self, Inversion};
use crate::renewal::{Distribution, RenewalSpec};
use crate::transform::{growth_ratio_expectation, TransformArgs};
use crate::{Error, Result};

/// Evaluation route for the joint exit functional.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhiRoute {
    /// Resolve to the closed form when the scenario admits one.
    #[default]
    Auto,
    /// Closed form from the renewal structure at the threshold: exact for
    /// deterministic initial delays with deterministic or exponential
    /// cycles, at machine precision.
    Exact,
    /// Coupled two-variable transform of the joint law, inverted with the
    /// summation method. Requires exponential cycles; accurate to roughly
    /// `1e-3` at the diagonal because the target has a kink there.
    Transform,
    /// Factorized transform expectation, inverted numerically. Faithful to
    /// a published factorization that drops the initial delays and the
    /// coupling between the players' pre-exit laws; retained so its output
    /// can be compared against the other routes, which it measurably
    /// disagrees with. Diverges term-by-term for exponential cycles whose
    /// rate is below the inversion grid, and reports that as an accuracy
    /// error instead of returning a number.
    Printed,
}

/// A functional value together with the route that produced it and, for
/// inversion-based routes, the inversion diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiOutcome {
    /// Value of the functional.
    pub value: f64,
    /// Concrete route that produced `value` (never [`PhiRoute::Auto`]).
    pub route: PhiRoute,
    /// Inversion diagnostics when `route` inverted a transform.
    pub inversion: Option<Inversion>,
}

/// Evaluates the joint exit functional at threshold `t_star` along the
/// automatically selected route.
///
/// # Errors
///
/// [`Error::AnalyticUnavailable`] when no closed form covers the scenario
/// (an exponential initial delay), plus the validation errors of
/// [`phi_functional_with`].
pub fn phi_functional(
    scenario: &DuelScenario,
    args: &TransformArgs,
    t_star: f64,
) -> Result<f64> {
    Ok(phi_functional_with(scenario, args, t_star, PhiRoute::Auto, laplace::DEFAULT_ORDER)?.value)
}

/// Evaluates the joint exit functional along a chosen route.
///
/// `order` is the inversion order for the transform-based routes and is
/// ignored by the closed form.
///
/// # Errors
///
/// [`Error::Domain`] for invalid arguments or threshold;
/// [`Error::AnalyticUnavailable`] when the route does not cover the
/// scenario; [`Error::DegenerateRenewal`] for a zero deterministic cycle
/// that must advance; [`Error::Accuracy`] when an inversion-based route
/// detects divergence or near-confluence.
pub fn phi_functional_with(
    scenario: &DuelScenario,
    args: &TransformArgs,
    t_star: f64,
    route: PhiRoute,
    order: usize,
) -> Result<PhiOutcome> {
    // Re-validate in case the argument struct was built by hand.
    let args = TransformArgs::new(args.theta0, args.theta1, args.vartheta0, args.vartheta1)?;
    if !t_star.is_finite() || t_star < 0.0 {
        return Err(Error::domain("threshold must be finite and >= 0"));
    }
    match route {
        PhiRoute::Auto | PhiRoute::Exact => Ok(PhiOutcome {
            value: exact_phi(scenario, &args, t_star)?,
            route: PhiRoute::Exact,
            inversion: None,
        }),
        PhiRoute::Transform => {
            let transform = coupled_transform(scenario, &args)?;
            let inversion = laplace::lc_inverse(transform, t_star, t_star, order)?;
            Ok(PhiOutcome {
                value: inversion.value,
                route: PhiRoute::Transform,
                inversion: Some(inversion),
            })
        }
        PhiRoute::Printed => {
            let transform = printed_transform(scenario, &args, t_star);
            let inversion = laplace::lc_inverse(transform, t_star, t_star, order)?;
            Ok(PhiOutcome {
                value: inversion.value,
                route: PhiRoute::Printed,
                inversion: Some(inversion),
            })
        }
    }
}

/// Law of one player's (pre-exit, exit) pair at its threshold.
enum ExitLaw {
    /// Both times deterministic: a lattice crossing, or a delay at or past
    /// the threshold (in which case the pre-exit time is zero).
    Fixed { pre: f64, exit: f64 },
    /// Exponential cycle with the delay short of the threshold: the exit
    /// overshoot past `threshold` is exponential with `rate`, independent
    /// of the pre-exit time by memorylessness.
    Memoryless { delay: f64, rate: f64, threshold: f64 },
}

fn exit_law(spec: &RenewalSpec, threshold: f64) -> Result<ExitLaw> {
    let delay = match spec.initial_delay {
        Distribution::Deterministic { value } => value,
        Distribution::Exponential { .. } => {
            return Err(Error::analytic_unavailable(
                "closed-form routes require deterministic initial delays; use simulation",
            ));
        }
    };
    if delay >= threshold {
        return Ok(ExitLaw::Fixed {
            pre: 0.0,
            exit: delay,
        });
    }
    match spec.cycle {
        Distribution::Deterministic { value: cycle } => {
            if cycle <= 0.0 {
                return Err(Error::DegenerateRenewal);
            }
            // First lattice point delay + m*cycle at or past the threshold,
            // with the division nudged back onto the lattice when it lands
            // within rounding of an integer.
            let mut m = libm::ceil((threshold - delay) / cycle);
            if delay + (m - 1.0) * cycle >= threshold {
                m -= 1.0;
            } else if delay + m * cycle < threshold {
                m += 1.0;
            }
            Ok(ExitLaw::Fixed {
                pre: delay + (m - 1.0) * cycle,
                exit: delay + m * cycle,
            })
        }
        Distribution::Exponential { rate } => Ok(ExitLaw::Memoryless {
            delay,
            rate,
            threshold,
        }),
    }
}

/// `expm1(w) / w`, equal to 1 at zero.
fn expm1_over(w: f64) -> f64 {
    if w == 0.0 {
        1.0
    } else {
        libm::expm1(w) / w
    }
}

impl ExitLaw {
    /// `E[e^{-x * pre}]`.
    fn pre_transform(&self, x: f64) -> f64 {
        match *self {
            ExitLaw::Fixed { pre, .. } => libm::exp(-x * pre),
            ExitLaw::Memoryless {
                delay,
                rate,
                threshold,
            } => {
                // Atom at the delay (no renewal before the threshold) plus
                // the density rate * e^{-rate (threshold - s)} of the last
                // renewal time s on (delay, threshold).
                let atom = libm::exp(-x * delay - rate * (threshold - delay));
                let gap = threshold - delay;
                let g = rate - x;
                atom + rate * libm::exp(-rate * threshold + g * delay) * gap * expm1_over(g * gap)
            }
        }
    }

    /// Deterministic exit time, or the threshold the overshoot starts from.
    fn exit_base(&self) -> f64 {
        match *self {
            ExitLaw::Fixed { exit, .. } => exit,
            ExitLaw::Memoryless { threshold, .. } => threshold,
        }
    }
}

/// `E[e^{-theta1 exit_A - vartheta1 exit_B}; exit_A <= exit_B]` given both
/// players' exit laws (ties go to player A).
fn win_factor(a: &ExitLaw, b: &ExitLaw, theta1: f64, vartheta1: f64) -> f64 {
    let p = a.exit_base();
    let q = b.exit_base();
    let prefix = libm::exp(-theta1 * p - vartheta1 * q);
    match (a, b) {
        (ExitLaw::Fixed { .. }, ExitLaw::Fixed { .. }) => {
            if p <= q {
                prefix
            } else {
                0.0
            }
        }
        (ExitLaw::Fixed { .. }, ExitLaw::Memoryless { rate: rb, .. }) => {
            // A exits at the fixed time p; B must overshoot past it.
            prefix * rb / (rb + vartheta1) * libm::exp(-(rb + vartheta1) * (p - q).max(0.0))
        }
        (ExitLaw::Memoryless { rate: ra, .. }, ExitLaw::Fixed { .. }) => {
            // B exits at the fixed time q; A's overshoot must stay below it.
            prefix * ra / (ra + theta1) * -libm::expm1(-(ra + theta1) * (q - p).max(0.0))
        }
        (
            ExitLaw::Memoryless { rate: ra, .. },
            ExitLaw::Memoryless { rate: rb, .. },
        ) => {
            let c = q - p;
            if c >= 0.0 {
                prefix * ra / (ra + theta1)
                    * (rb / (rb + vartheta1)
                        - libm::exp(-(ra + theta1) * c) * rb / (ra + theta1 + rb + vartheta1))
            } else {
                prefix * rb / (rb + vartheta1) * libm::exp((rb + vartheta1) * c) * ra
                    / (ra + theta1 + rb + vartheta1)
            }
        }
    }
}

/// Closed form of the functional: the pre-exit transforms factor out of the
/// win-weighted exit term because each player's overshoot is independent of
/// its pre-exit time, and the players are independent.
fn exact_phi(scenario: &DuelScenario, args: &TransformArgs, t_star: f64) -> Result<f64> {
    let a = exit_law(&scenario.player_a.renewal, t_star)?;
    let b = exit_law(&scenario.player_b.renewal, t_star)?;
    Ok(a.pre_transform(args.theta0)
        * b.pre_transform(args.vartheta0)
        * win_factor(&a, &b, args.theta1, args.vartheta1))
}

/// Relative tolerance below which the coupled transform refuses to divide
/// by a near-vanishing confluence difference.
const CONFLUENCE_TOL: f64 = 1e-6;

fn det_delay(spec: &RenewalSpec, who: &str) -> Result<f64> {
    match spec.initial_delay {
        Distribution::Deterministic { value } => Ok(value),
        Distribution::Exponential { .. } => Err(Error::analytic_unavailable(format!(
            "transform route requires a deterministic initial delay for player {who}"
        ))),
    }
}

fn exp_cycle_rate(spec: &RenewalSpec, who: &str) -> Result<f64> {
    match spec.cycle {
        Distribution::Exponential { rate } => Ok(rate),
        Distribution::Deterministic { .. } => Err(Error::analytic_unavailable(format!(
            "transform route requires an exponential cycle for player {who}"
        ))),
    }
}

/// Builds the coupled two-variable transform
/// `F(u, v) = E[(1 - e^{-u S_pre_section}) ... ]` of the joint law for
/// exponential cycles and deterministic delays, in extended precision so
/// the inversion's weight cancellation does not amplify rounding.
fn coupled_transform(
    scenario: &DuelScenario,
    args: &TransformArgs,
) -> Result<impl FnMut(Dd, Dd) -> Result<Dd>> {
    let rate_a = exp_cycle_rate(&scenario.player_a.renewal, "A")?;
    let rate_b = exp_cycle_rate(&scenario.player_b.renewal, "B")?;
    let delay_a = det_delay(&scenario.player_a.renewal, "A")?;
    let delay_b = det_delay(&scenario.player_b.renewal, "B")?;

    let a = Dd::from_f64(rate_a);
    let b = Dd::from_f64(rate_b);
    let da = Dd::from_f64(delay_a);
    let db = Dd::from_f64(delay_b);
    let theta0 = args.theta0;
    let th0 = Dd::from_f64(args.theta0);
    let th1 = Dd::from_f64(args.theta1);
    let vt0 = Dd::from_f64(args.vartheta0);
    let vt1 = Dd::from_f64(args.vartheta1);
    let b_after_a = delay_b >= delay_a;

    let exp_neg = |x: Dd| (-x).exp();

    Ok(move |u: Dd, v: Dd| -> Result<Dd> {
        // Guard the divisions by (c1 - rate_a) for c1 in {th0 + u, th0}.
        for c1 in [theta0 + u.to_f64(), theta0] {
            if libm::fabs(c1 - rate_a) < CONFLUENCE_TOL * rate_a.max(1.0) {
                return Err(Error::accuracy(format!(
                    "transform route near confluence: |{c1:.9} - rate {rate_a:.9}| below guard"
                )));
            }
        }

        // Player A section: coefficients of e^{-rho_i s} in the conditional
        // transform of A's section given B exits at s.
        let a_j = |c1: Dd, c2: Dd| {
            a / (a + c2) * exp_neg((c1 + c2) * da) * (c1 + c2 + a) / (c1 + c2)
        };
        let b_j = |c1: Dd, c2: Dd| a * a / ((c1 - a) * (c1 + c2));
        let c_j = |c1: Dd, c2: Dd| -(a / (a + c2)) * exp_neg((c1 - a) * da) * c1 / (c1 - a);
        let rho = [Dd::ZERO, th0 + th1 + u, a + th1, a + th1 + u];
        let r = [
            (Dd::ONE - exp_neg(u * da)) * exp_neg(th1 * da) + a_j(th0 + u, th1)
                - a_j(th0, th1 + u),
            b_j(th0 + u, th1) - b_j(th0, th1 + u),
            c_j(th0 + u, th1),
            -c_j(th0, th1 + u),
        ];

        // Player B section integrated against each e^{-rho_i s} kernel.
        let m_t = |w: Dd, y: Dd| {
            if y >= db {
                let gap = y - db;
                exp_neg(w * db) * (Dd::ONE + b * gap * (w * gap).one_minus_exp_neg_over())
            } else {
                Dd::ZERO
            }
        };
        let j_b = |c1: Dd, c2: Dd, y: Dd| {
            b / (b + c2) * (m_t(c1 + c2, y) - exp_neg((b + c2) * y) * m_t(c1 - b, y))
        };
        let j_b_inf =
            |c1: Dd, c2: Dd| b / (b + c2) * exp_neg((c1 + c2) * db) * (c1 + c2 + b) / (c1 + c2);
        let k_b = |c1: Dd, c2: Dd, l: Dd| j_b_inf(c1, c2) - j_b(c1, c2, l);

        let mut total = Dd::ZERO;
        if b_after_a {
            let mut head = Dd::ZERO;
            for i in 0..4 {
                head = head + r[i] * exp_neg(rho[i] * db);
            }
            total = head * (Dd::ONE - exp_neg(v * db)) * exp_neg(vt1 * db);
        }
        for i in 0..4 {
            total = total
                + r[i] * (k_b(vt0 + v, vt1 + rho[i], da) - k_b(vt0, vt1 + v + rho[i], da));
        }
        Ok(total)
    })
}

/// One factor of the factorized transform,
/// `E[(1 - e^{-x0 T}) e^{x1 T} / (1 - e^{-x2 T})]`, in extended precision
/// for deterministic laws. Exponential laws fall back to the double
/// precision digamma closed form (with its divergence detection), which
/// limits the inversion orders that stay below the weight-cancellation
/// noise for them.
fn printed_factor(law: &Distribution, x0: Dd, x1: Dd, x2: Dd) -> Result<Dd> {
    match law {
        Distribution::Deterministic { value } => {
            if *value <= 0.0 {
                return Err(Error::domain(
                    "factorized transform needs a positive deterministic cycle",
                ));
            }
            let one_minus = |e: Dd| Dd::ONE - (-e).exp();
            Ok(one_minus(x0.mul_f64(*value)) * x1.mul_f64(*value).exp()
                / one_minus(x2.mul_f64(*value)))
        }
        Distribution::Exponential { .. } => {
            growth_ratio_expectation(law, x0.to_f64(), x1.to_f64(), x2.to_f64())
                .map(Dd::from_f64)
        }
    }
}

/// Builds the factorized transform: the product of one growth-ratio
/// expectation per cycle law and the product kernel at the threshold. The
/// exponent layout matches [`GammaTerms`]: the `tau` factor carries player
/// B's argument pair, the `sigma` factor player A's, and the `sigma`
/// denominator together with the threshold kernel carry the sum of all six
/// exponents.
fn printed_transform(
    scenario: &DuelScenario,
    args: &TransformArgs,
    t_star: f64,
) -> impl FnMut(Dd, Dd) -> Result<Dd> {
    let cycle_a = scenario.player_a.renewal.cycle.clone();
    let cycle_b = scenario.player_b.renewal.cycle.clone();
    let vt0 = Dd::from_f64(args.vartheta0);
    let vt1 = Dd::from_f64(args.vartheta1);
    let th0 = Dd::from_f64(args.theta0);
    let args_sum =
        Dd::from_f64(args.theta0 + args.theta1) + Dd::from_f64(args.vartheta0 + args.vartheta1);
    move |u: Dd, v: Dd| -> Result<Dd> {
        let product_x = u + v + args_sum;
        let tau_factor = printed_factor(&cycle_b, v, vt0 + v, vt0 + vt1 + v)?;
        let sigma_factor = printed_factor(&cycle_a, u, th0 + u, product_x)?;
        let kernel = (-product_x.mul_f64(t_star)).exp();
        Ok(tau_factor * sigma_factor * kernel)
    }
}
