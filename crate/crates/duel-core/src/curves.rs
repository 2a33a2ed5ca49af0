//! Accumulative success-probability curves.
//!
//! A [`SuccessCurve`] maps elapsed time to the probability that acting at
//! that moment succeeds. Curves are validated once at construction and are
//! immutable afterwards, so evaluation never fails on a well-formed curve
//! (only a negative time argument can be rejected).

use alloc::vec::Vec;

use crate::{Error, Result};

/// Functional form of a success curve.
#[derive(Clone, Debug, PartialEq)]
#[non_exhaustive]
pub enum CurveKind {
    /// `P(t) = 1 - e^{-rate t}`; saturates toward 1, never attains it.
    ExponentialSaturation {
        /// Saturation rate, strictly positive.
        rate: f64,
    },
    /// `P(t) = 1 / (1 + e^{-steepness (t - midpoint)})`.
    Logistic {
        /// Time of the 50% point.
        midpoint: f64,
        /// Slope parameter, strictly positive.
        steepness: f64,
    },
    /// `P(t) = min(t / t_ramp, 1)`; attains 1 at `t_ramp`.
    LinearRamp {
        /// End of the ramp, strictly positive.
        t_ramp: f64,
    },
    /// Piecewise-linear interpolation through `(t, p)` knots; constant at
    /// the last knot's value beyond it.
    Tabulated {
        /// Knots, strictly increasing in `t` (starting at `t = 0`),
        /// nondecreasing in `p`, with `p` in `[0, 1]`.
        knots: Vec<(f64, f64)>,
    },
}

/// A validated success curve with an optional finite horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessCurve {
    kind: CurveKind,
    /// Finite horizon, or `None` for an unbounded curve.
    t_max: Option<f64>,
}

impl SuccessCurve {
    /// Validates and builds a curve. `t_max` of `None` means unbounded.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] when a parameter violates its constraint
    /// (non-positive rate/steepness/ramp, an invalid horizon, or a knot
    /// list that is empty, does not start at `t = 0`, is not strictly
    /// increasing in time, leaves `[0, 1]`, or decreases).
    pub fn new(kind: CurveKind, t_max: Option<f64>) -> Result<SuccessCurve> {
        if let Some(m) = t_max {
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::domain("t_max must be finite and positive"));
            }
        }
        match &kind {
            CurveKind::ExponentialSaturation { rate } => {
                if !rate.is_finite() || *rate <= 0.0 {
                    return Err(Error::domain("saturation rate must be positive and finite"));
                }
            }
            CurveKind::Logistic {
                midpoint,
                steepness,
            } => {
                if !midpoint.is_finite() {
                    return Err(Error::domain("logistic midpoint must be finite"));
                }
                if !steepness.is_finite() || *steepness <= 0.0 {
                    return Err(Error::domain("logistic steepness must be positive and finite"));
                }
            }
            CurveKind::LinearRamp { t_ramp } => {
                if !t_ramp.is_finite() || *t_ramp <= 0.0 {
                    return Err(Error::domain("ramp end must be positive and finite"));
                }
            }
            CurveKind::Tabulated { knots } => {
                if knots.is_empty() {
                    return Err(Error::domain("tabulated curve needs at least one knot"));
                }
                if knots[0].0 != 0.0 {
                    return Err(Error::domain(
                        "tabulated curve must start with a knot at t = 0",
                    ));
                }
                for window in knots.windows(2) {
                    if window[1].0 <= window[0].0 {
                        return Err(Error::domain(
                            "tabulated knots must be strictly increasing in time",
                        ));
                    }
                    if window[1].1 < window[0].1 {
                        return Err(Error::domain(
                            "tabulated probabilities must be nondecreasing",
                        ));
                    }
                }
                for &(t, p) in knots {
                    if !t.is_finite() || !(0.0..=1.0).contains(&p) {
                        return Err(Error::domain(
                            "tabulated knots must be finite with p in [0, 1]",
                        ));
                    }
                }
            }
        }
        Ok(SuccessCurve { kind, t_max })
    }

    /// The curve's functional form.
    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// The finite horizon, if any.
    pub fn t_max(&self) -> Option<f64> {
        self.t_max
    }

    /// Evaluates `P(t)`.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] when `t < 0` or not finite.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::domain("curve argument must be finite and >= 0"));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            CurveKind::ExponentialSaturation { rate } => -libm::expm1(-rate * t),
            CurveKind::Logistic {
                midpoint,
                steepness,
            } => 1.0 / (1.0 + libm::exp(-steepness * (t - midpoint))),
            CurveKind::LinearRamp { t_ramp } => (t / t_ramp).min(1.0),
            CurveKind::Tabulated { knots } => {
                let last = knots[knots.len() - 1];
                if t >= last.0 {
                    return last.1;
                }
                // First knot is at 0, so t lies inside some segment.
                let idx = knots.partition_point(|&(kt, _)| kt <= t);
                let (t0, p0) = knots[idx - 1];
                let (t1, p1) = knots[idx];
                p0 + (p1 - p0) * ((t - t0) / (t1 - t0))
            }
        }
    }

    /// Largest probability the curve attains (or approaches) on its domain,
    /// together with whether that supremum is actually attained at a finite
    /// time.
    fn supremum(&self) -> (f64, bool) {
        let horizon = self.t_max;
        match &self.kind {
            CurveKind::ExponentialSaturation { .. } | CurveKind::Logistic { .. } => match horizon {
                Some(m) => (self.eval_unchecked(m), true),
                None => (1.0, false),
            },
            CurveKind::LinearRamp { t_ramp } => match horizon {
                Some(m) if m < *t_ramp => (self.eval_unchecked(m), true),
                _ => (1.0, true),
            },
            CurveKind::Tabulated { knots } => {
                let last = knots[knots.len() - 1];
                match horizon {
                    Some(m) if m < last.0 => (self.eval_unchecked(m), true),
                    _ => (last.1, true),
                }
            }
        }
    }

    /// Smallest `t >= 0` with `P(t) >= p`, to absolute tolerance `1e-9`.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] for `p` outside `[0, 1]`;
    /// [`Error::Unattainable`] when the curve never reaches `p` within its
    /// horizon (including `p = 1` on curves that only saturate toward 1).
    pub fn inverse(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("target probability must lie in [0, 1]"));
        }
        if self.eval_unchecked(0.0) >= p {
            return Ok(0.0);
        }
        let (sup, attained) = self.supremum();
        if p > sup || (p == sup && !attained) {
            return Err(Error::Unattainable { requested: p });
        }
        match &self.kind {
            CurveKind::ExponentialSaturation { rate } => Ok(-libm::log1p(-p) / rate),
            CurveKind::Logistic {
                midpoint,
                steepness,
            } => Ok((midpoint + libm::log(p / (1.0 - p)) / steepness).max(0.0)),
            CurveKind::LinearRamp { t_ramp } => Ok(p * t_ramp),
            CurveKind::Tabulated { knots } => {
                // First segment whose right endpoint reaches p; linear
                // solve inside it (flat segments are skipped, which keeps
                // the result the *smallest* qualifying time).
                for window in knots.windows(2) {
                    let (t0, p0) = window[0];
                    let (t1, p1) = window[1];
                    if p1 >= p {
                        if p0 >= p {
                            return Ok(t0);
                        }
                        return Ok(t0 + (t1 - t0) * ((p - p0) / (p1 - p0)));
                    }
                }
                // supremum() guaranteed reachability, so p sits at the last
                // knot's value.
                Ok(knots[knots.len() - 1].0)
            }
        }
    }
}
