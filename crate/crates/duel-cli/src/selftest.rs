//! Round-trip checks of the transform pipeline against closed-form pairs.
//!
//! Three bivariate functions with known transforms — a constant, a
//! separable exponential, and a box indicator — are pushed through both
//! halves of the pipeline and compared against the closed forms:
//!
//! - **forward leg**: the quadrature transform of the function against the
//!   closed-form transform, on a 3x3 grid of transform arguments;
//! - **inverse leg**: numerical inversion of the closed-form transform
//!   (supplied as an extended-precision closure) against the function, on a
//!   3x3 grid of time points.
//!
//! The two legs meet at the exact closed form, which is what certifies the
//! composition: feeding the quadrature output straight into the inverter
//! would be meaningless, because inversion at order 18 amplifies any error
//! in its input by a factor of order 1e20 — the closed-form middle is the
//! only numerically honest reading of "round trip". Grids stay where the
//! inverter is healthy: smooth pairs anywhere moderate, the indicator at
//! points no deeper than a tenth of the box edge (accuracy degrades
//! rapidly toward the jump).

use duel_core::dd::Dd;
use duel_core::laplace::{lc_forward, lc_inverse};
use duel_core::Result;

/// Worst relative error allowed on the forward (quadrature) leg.
pub const FORWARD_TOL: f64 = 1e-6;

/// Worst relative error allowed on the inverse (order-18) leg.
pub const INVERSE_TOL: f64 = 1e-5;

/// Inversion order at which [`INVERSE_TOL`] is calibrated.
pub const CHECK_ORDER: usize = 18;

/// Result of one closed-form pair check.
#[derive(Clone, Copy, Debug)]
pub struct PairCheck {
    /// Which pair.
    pub name: &'static str,
    /// Worst relative error of `lc_forward(f)` against the closed form
    /// over the transform-argument grid.
    pub forward_worst_rel: f64,
    /// Worst relative error of `lc_inverse(closed form)` against `f` over
    /// the time grid.
    pub inverse_worst_rel: f64,
}

impl PairCheck {
    /// Both legs within their tolerances.
    pub fn passed(&self) -> bool {
        self.forward_worst_rel <= FORWARD_TOL && self.inverse_worst_rel <= INVERSE_TOL
    }
}

/// Transform-argument grid shared by all pairs.
const TRANSFORM_GRID: [f64; 3] = [0.5, 1.0, 2.0];

/// Time grid for the smooth pairs.
const SMOOTH_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

/// Box edge of the indicator pair, with time points kept at most a tenth
/// of the way to the jump — inversion accuracy decays quickly toward a
/// discontinuity, and a tenth of the edge is where order 18 still holds
/// the shared tolerance.
const BOX_EDGE: f64 = 10.0;
const INDICATOR_TIMES: [f64; 3] = [0.5, 0.75, 1.0];

/// Quadrature tolerance for the forward leg (certified to ten times this).
const QUAD_TOL: f64 = 1e-9;

fn check_pair(
    name: &'static str,
    f: impl Fn(f64, f64) -> f64 + Copy,
    closed_form: impl Fn(Dd, Dd) -> Dd + Copy,
    times_t: &[f64],
    times_s: &[f64],
    order: usize,
) -> Result<PairCheck> {
    let mut forward_worst_rel = 0.0_f64;
    for &u in &TRANSFORM_GRID {
        for &v in &TRANSFORM_GRID {
            let numeric = lc_forward(f, u, v, QUAD_TOL)?;
            let exact = closed_form(Dd::from_f64(u), Dd::from_f64(v)).to_f64();
            forward_worst_rel = forward_worst_rel.max(((numeric - exact) / exact).abs());
        }
    }
    let mut inverse_worst_rel = 0.0_f64;
    for &t in times_t {
        for &s in times_s {
            let inverted = lc_inverse(|p, q| Ok(closed_form(p, q)), t, s, order)?.value;
            let truth = f(t, s);
            inverse_worst_rel = inverse_worst_rel.max(((inverted - truth) / truth).abs());
        }
    }
    Ok(PairCheck {
        name,
        forward_worst_rel,
        inverse_worst_rel,
    })
}

/// Runs all three pair checks at the given inversion order.
///
/// # Errors
///
/// Propagates quadrature certification failures and inversion domain
/// errors; tolerance violations are reported in the [`PairCheck`]s, not as
/// errors.
pub fn run_transform_checks(order: usize) -> Result<Vec<PairCheck>> {
    let constant = check_pair(
        "constant",
        |_, _| 0.7,
        |_, _| Dd::from_f64(0.7),
        &SMOOTH_TIMES,
        &SMOOTH_TIMES,
        order,
    )?;
    let separable = check_pair(
        "separable-exponential",
        |t, s| (-(t + s)).exp(),
        |p, q| (p / (p + Dd::ONE)) * (q / (q + Dd::ONE)),
        &SMOOTH_TIMES,
        &SMOOTH_TIMES,
        order,
    )?;
    let indicator = check_pair(
        "indicator",
        |t, s| {
            if t <= BOX_EDGE && s <= BOX_EDGE {
                1.0
            } else {
                0.0
            }
        },
        |p, q| {
            let px = Dd::ONE - (-p.mul_f64(BOX_EDGE)).exp();
            let qx = Dd::ONE - (-q.mul_f64(BOX_EDGE)).exp();
            px * qx
        },
        &INDICATOR_TIMES,
        &INDICATOR_TIMES,
        order,
    )?;
    Ok(vec![constant, separable, indicator])
}
