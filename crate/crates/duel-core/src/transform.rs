//! Building blocks of the analytic route: the transform argument vector,
//! the six exponential decay kernels appearing in the joint-functional
//! transform, and closed-form expectations of those kernels under
//! deterministic and exponential laws.

use crate::renewal::Distribution;
use crate::{Error, Result};

/// Exponent arguments of the joint exit functional
/// `Phi(theta0, theta1, vartheta0, vartheta1)
///   = E[e^{-theta0 S_pre - theta1 S_exit - vartheta0 T_pre - vartheta1 T_exit}; win]`:
/// `theta0`/`theta1` weight player A's pre-exit/exit times and
/// `vartheta0`/`vartheta1` player B's.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TransformArgs {
    /// Weight on player A's pre-exit time.
    pub theta0: f64,
    /// Weight on player A's exit time.
    pub theta1: f64,
    /// Weight on player B's pre-exit time.
    pub vartheta0: f64,
    /// Weight on player B's exit time.
    pub vartheta1: f64,
}

impl TransformArgs {
    /// All-zero arguments: the functional reduces to the win probability.
    pub const ZERO: TransformArgs = TransformArgs {
        theta0: 0.0,
        theta1: 0.0,
        vartheta0: 0.0,
        vartheta1: 0.0,
    };

    /// Validates nonnegative, finite arguments.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] when any argument is negative or non-finite.
    pub fn new(theta0: f64, theta1: f64, vartheta0: f64, vartheta1: f64) -> Result<TransformArgs> {
        for x in [theta0, theta1, vartheta0, vartheta1] {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::domain("transform arguments must be finite and >= 0"));
            }
        }
        Ok(TransformArgs {
            theta0,
            theta1,
            vartheta0,
            vartheta1,
        })
    }

    /// The arguments with players A and B swapped.
    pub fn swapped(self) -> TransformArgs {
        TransformArgs {
            theta0: self.vartheta0,
            theta1: self.vartheta1,
            vartheta0: self.theta0,
            vartheta1: self.theta1,
        }
    }
}

/// The six decay kernels `e^{-x t}` used by the transform of the joint
/// functional, precomputed as their exponents `x`.
///
/// The lowercase kernels decay in player B's variables (applied to B's
/// cycle `tau`), the capitalized ones in player A's (applied to `sigma`),
/// and the product kernel couples all six exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaTerms {
    /// Exponent of `gamma0`: `v`.
    pub gamma0_x: f64,
    /// Exponent of `gamma1`: `vartheta0 + v`.
    pub gamma1_x: f64,
    /// Exponent of `gamma2`: `vartheta0 + vartheta1 + v`.
    pub gamma2_x: f64,
    /// Exponent of `Gamma0`: `u`.
    pub cap_gamma0_x: f64,
    /// Exponent of `Gamma1`: `theta0 + u`.
    pub cap_gamma1_x: f64,
    /// Exponent of `Gamma2`: `theta0 + theta1 + u`.
    pub cap_gamma2_x: f64,
}

impl GammaTerms {
    /// Builds the kernel set for transform variables `(u, v)`.
    pub fn new(args: &TransformArgs, u: f64, v: f64) -> GammaTerms {
        GammaTerms {
            gamma0_x: v,
            gamma1_x: args.vartheta0 + v,
            gamma2_x: args.vartheta0 + args.vartheta1 + v,
            cap_gamma0_x: u,
            cap_gamma1_x: args.theta0 + u,
            cap_gamma2_x: args.theta0 + args.theta1 + u,
        }
    }

    /// `gamma0(t) = e^{-v t}`.
    pub fn gamma0(&self, t: f64) -> f64 {
        libm::exp(-self.gamma0_x * t)
    }

    /// `gamma1(t) = e^{-(vartheta0 + v) t}`.
    pub fn gamma1(&self, t: f64) -> f64 {
        libm::exp(-self.gamma1_x * t)
    }

    /// `gamma2(t) = e^{-(vartheta0 + vartheta1 + v) t}`.
    pub fn gamma2(&self, t: f64) -> f64 {
        libm::exp(-self.gamma2_x * t)
    }

    /// `Gamma0(t) = e^{-u t}`.
    pub fn cap_gamma0(&self, t: f64) -> f64 {
        libm::exp(-self.cap_gamma0_x * t)
    }

    /// `Gamma1(t) = e^{-(theta0 + u) t}`.
    pub fn cap_gamma1(&self, t: f64) -> f64 {
        libm::exp(-self.cap_gamma1_x * t)
    }

    /// `Gamma2(t) = e^{-(theta0 + theta1 + u) t}`.
    pub fn cap_gamma2(&self, t: f64) -> f64 {
        libm::exp(-self.cap_gamma2_x * t)
    }

    /// Exponent of the product kernel: the sum of all six variables.
    pub fn product_x(&self) -> f64 {
        self.gamma2_x + self.cap_gamma2_x
    }

    /// Product kernel `gamma2(t) * Gamma2(t) = e^{-(sum of all six) t}`.
    pub fn product(&self, t: f64) -> f64 {
        libm::exp(-self.product_x() * t)
    }
}

/// `E[e^{-x D}]` for a duration law `D`: `e^{-x d}` for a deterministic
/// duration `d`, `rate / (rate + x)` for an exponential law.
///
/// # Errors
///
/// [`Error::Domain`] when `x` is negative or non-finite.
pub fn expected_exponential(dist: &Distribution, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("exponent must be finite and >= 0"));
    }
    Ok(match dist {
        Distribution::Deterministic { value } => libm::exp(-x * value),
        Distribution::Exponential { rate } => rate / (rate + x),
    })
}

/// Digamma function for `x > 0`, by upward recurrence into the asymptotic
/// region followed by the standard Bernoulli-number series.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_{2n} / (2n x^{2n}) through n = 6; the first
    // omitted term is ~8e-16 at the shift threshold x = 10.
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    acc + libm::log(x) - 0.5 * inv - series
}

/// `E[(1 - e^{-x0 T}) e^{x1 T} / (1 - e^{-x2 T})]` for a duration law `T`
/// — the shape of each factor of the factorized transform expectation,
/// with decay `x0 >= 0` in the numerator, growth `x1` from the reciprocal
/// first-kernel, and decay `x2 > 0` inside the reciprocal difference.
///
/// Deterministic laws evaluate directly; exponential laws use the digamma
/// closed form `(rate/x2) [psi((rate - x1 + x0)/x2) - psi((rate - x1)/x2)]`
/// of the term-by-term geometric expansion.
///
/// # Errors
///
/// [`Error::Domain`] for a nonpositive deterministic duration or
/// `x0 < 0`/`x2 <= 0`; [`Error::Accuracy`] when the expectation diverges
/// for an exponential law (`x1 >= rate`).
pub fn growth_ratio_expectation(dist: &Distribution, x0: f64, x1: f64, x2: f64) -> Result<f64> {
    if !x0.is_finite() || !x2.is_finite() || x0 < 0.0 || x2 <= 0.0 {
        return Err(Error::domain(
            "growth-ratio expectation needs x0 >= 0 and x2 > 0",
        ));
    }
    match dist {
        Distribution::Deterministic { value } => {
            if *value <= 0.0 {
                return Err(Error::domain(
                    "growth-ratio expectation needs a positive deterministic duration",
                ));
            }
            Ok(-libm::expm1(-x0 * value) * libm::exp(x1 * value) / -libm::expm1(-x2 * value))
        }
        Distribution::Exponential { rate } => {
            if x1 >= *rate {
                return Err(Error::accuracy(alloc::format!(
                    "expectation diverges: growth exponent {x1:.6} >= exponential rate {rate:.6}"
                )));
            }
            let base = (rate - x1) / x2;
            Ok(rate / x2 * (digamma(base + x0 / x2) - digamma(base)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::integrate_adaptive;

    fn det(value: f64) -> Distribution {
        Distribution::Deterministic { value }
    }

    fn exp_law(rate: f64) -> Distribution {
        Distribution::Exponential { rate }
    }

    #[test]
    fn expected_exponential_examples() {
        assert_eq!(expected_exponential(&det(6.0), 0.0).unwrap(), 1.0);
        assert_eq!(expected_exponential(&exp_law(2.0), 2.0).unwrap(), 0.5);
        let v = expected_exponential(&det(4.0), 0.25).unwrap();
        assert!((v - (-1.0_f64).exp()).abs() < 1e-15);
        assert!(expected_exponential(&det(4.0), -0.1).is_err());
        // Quadrature oracle for the exponential law.
        let numeric =
            integrate_adaptive(&|s: f64| 2.0 * (-2.0 * s).exp() * (-2.0 * s).exp(), 0.0, 40.0, 1e-12).0;
        assert!((numeric - 0.5).abs() < 1e-9);
    }

    #[test]
    fn kernel_identity_and_range() {
        let args = TransformArgs::new(0.3, 0.7, 0.11, 0.05).unwrap();
        let mut stream = crate::rng::Stream::new(5);
        for _ in 0..200 {
            let u = stream.next_uniform() * 3.0 + 1e-3;
            let v = stream.next_uniform() * 3.0 + 1e-3;
            let t = stream.next_uniform() * 30.0;
            let k = GammaTerms::new(&args, u, v);
            let direct = k.product(t);
            let factored = k.gamma2(t) * k.cap_gamma2(t);
            // Exponent magnitudes reach ~220, so argument rounding alone
            // moves the result by up to ~5e-14 relative.
            assert!(
                (direct - factored).abs() <= 1e-12 * direct.max(1e-300),
                "product kernel mismatch at t={t}: {direct} vs {factored}"
            );
            for value in [
                k.gamma0(t),
                k.gamma1(t),
                k.gamma2(t),
                k.cap_gamma0(t),
                k.cap_gamma1(t),
                k.cap_gamma2(t),
                direct,
            ] {
                assert!(value > 0.0 && value <= 1.0);
            }
        }
    }

    #[test]
    fn digamma_reference_values_and_recurrence() {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0) - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        let half = -EULER_GAMMA - 2.0 * core::f64::consts::LN_2;
        assert!((digamma(0.5) - half).abs() < 1e-14);
        for x in [0.3, 1.7, 4.2, 25.0] {
            let lhs = digamma(x + 1.0);
            let rhs = digamma(x) + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-13, "recurrence failed at {x}");
        }
    }

    #[test]
    fn growth_ratio_deterministic_formula() {
        let v = growth_ratio_expectation(&det(4.0), 0.2, 0.05, 0.5).unwrap();
        let expected = (1.0 - (-0.8_f64).exp()) * (0.2_f64).exp() / (1.0 - (-2.0_f64).exp());
        assert!((v - expected).abs() < 1e-14);
        assert!(growth_ratio_expectation(&det(0.0), 0.2, 0.05, 0.5).is_err());
    }

    #[test]
    fn growth_ratio_exponential_matches_quadrature() {
        let (rate, x0, x1, x2) = (0.25, 0.3, 0.1, 0.5);
        let closed = growth_ratio_expectation(&exp_law(rate), x0, x1, x2).unwrap();
        let integrand = move |t: f64| {
            if t == 0.0 {
                // Limit x0/x2 of the ratio at the origin, times the density.
                rate * x0 / x2
            } else {
                rate * (-rate * t).exp() * (-libm::expm1(-x0 * t)) * (x1 * t).exp()
                    / (-libm::expm1(-x2 * t))
            }
        };
        let numeric = integrate_adaptive(&integrand, 0.0, 400.0, 1e-12).0;
        assert!(
            (closed - numeric).abs() < 1e-9,
            "closed {closed} vs quadrature {numeric}"
        );
    }

    #[test]
    fn growth_ratio_divergence_detection() {
        let err = growth_ratio_expectation(&exp_law(0.25), 0.3, 0.25, 0.5).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)));
        let err = growth_ratio_expectation(&exp_law(0.25), 0.3, 0.4, 0.5).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)));
        assert!(growth_ratio_expectation(&exp_law(0.25), 0.3, 0.2499, 0.5).is_ok());
    }

    #[test]
    fn swapped_args_swap_players() {
        let args = TransformArgs::new(1.0, 2.0, 3.0, 4.0).unwrap();
        let s = args.swapped();
        assert_eq!((s.theta0, s.theta1, s.vartheta0, s.vartheta1), (3.0, 4.0, 1.0, 2.0));
        assert!(TransformArgs::new(-0.1, 0.0, 0.0, 0.0).is_err());
    }
}
