//! Double-double arithmetic: unevaluated sums of two `f64`s giving roughly
//! 106 bits of significand.
//!
//! The numerical inversion in [`crate::laplace`] multiplies transform values
//! by weights as large as `5e11` and then cancels them almost completely;
//! in plain `f64` the resulting noise floor (about `|W|_max^2 * eps`)
//! exceeds the documented inversion accuracy from order 14 upward. All
//! inversion internals therefore run on [`Dd`] values. The type is exposed
//! so callers can supply extended-precision transforms of their own.
//!
//! The algorithms are the classical error-free transformations (TwoSum,
//! FMA-based TwoProd) and the exp evaluation follows the usual
//! reduce-by-`ln 2`, scale-by-`2^-9`, Taylor, square-back-up scheme.

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// A double-double value: `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    /// Leading component (the value rounded to nearest `f64`).
    pub hi: f64,
    /// Trailing error term.
    pub lo: f64,
}

/// `ln 2` to double-double precision.
pub const LN2: Dd = Dd {
    hi: core::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

/// Error-free sum: returns `(s, e)` with `s = fl(a+b)` and `a+b = s+e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|` (or `a == 0`).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = libm::fma(a, b, -p);
    (p, e)
}

impl Dd {
    /// Zero.
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    /// One.
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Builds a normalized value from two components (any magnitudes).
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// Lifts an `f64` exactly.
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Converts a (possibly large) unsigned integer exactly.
    ///
    /// Exact for inputs below `2^106` or so, which covers every integer this
    /// crate produces (the largest inversion-weight numerator is below
    /// `2^95`).
    pub fn from_u128(x: u128) -> Dd {
        let hi = x as f64;
        // `hi` is integer-valued; the cast back is exact for our range, so
        // the residual is the exact conversion error and fits in one f64.
        let residual = x as i128 - hi as i128;
        let (s, e) = quick_two_sum(hi, residual as f64);
        Dd { hi: s, lo: e }
    }

    /// Rounds back to `f64`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Absolute value.
    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Multiplies by an exact power of two (exact operation).
    #[inline]
    pub fn ldexp(self, k: i32) -> Dd {
        Dd {
            hi: libm::scalbn(self.hi, k),
            lo: libm::scalbn(self.lo, k),
        }
    }

    /// Multiplies by a plain `f64`.
    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (s, t) = quick_two_sum(p, e + self.lo * b);
        Dd { hi: s, lo: t }
    }

    /// Divides by a plain `f64`.
    #[inline]
    pub fn div_f64(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }

    /// Reciprocal.
    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    /// `e^self`, accurate to roughly 1 ulp of double-double.
    ///
    /// Returns `Dd::ZERO` on deep underflow; callers in this crate never
    /// evaluate beyond `|x| < 745`.
    pub fn exp(self) -> Dd {
        let x = self.hi;
        if x <= -745.0 {
            return Dd::ZERO;
        }
        if x == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        // Range reduction: x = k ln2 + r with |r| <= ln2 / 2.
        let k = libm::round(x / core::f64::consts::LN_2);
        let r = self - LN2.mul_f64(k);
        // Scale down so the Taylor series converges in a handful of terms.
        let s = r.ldexp(-9);
        // expm1(s) by Taylor: s + s^2/2! + ...
        let mut term = s;
        let mut sum = s;
        let mut factorial = 1.0_f64;
        for i in 2..32 {
            factorial *= i as f64;
            term = term * s;
            let contribution = term.div_f64(factorial);
            sum = sum + contribution;
            if libm::fabs(contribution.hi) < 1.0e-35 * libm::fabs(sum.hi) + 1.0e-320 {
                break;
            }
        }
        // Square back up: (1+t)^2 = 1 + (t^2 + 2t), nine times.
        let mut t = sum;
        for _ in 0..9 {
            t = t * t + t.ldexp(1);
        }
        (t + Dd::ONE).ldexp(k as i32)
    }

    /// `(1 - e^{-self}) / self`, stable near zero; equals 1 at zero.
    pub fn one_minus_exp_neg_over(self) -> Dd {
        if libm::fabs(self.hi) < 1.0e-2 {
            // Taylor: 1 - x/2 + x^2/6 - x^3/24 + ...; terms below dd
            // precision after ~12 steps at |x| <= 1e-2.
            let mut term = Dd::ONE;
            let mut sum = Dd::ONE;
            for i in 1..16 {
                term = term * self.div_f64(-((i + 1) as f64));
                sum = sum + term;
                if libm::fabs(term.hi) < 1.0e-35 {
                    break;
                }
            }
            sum
        } else {
            (Dd::ONE - (-self).exp()) / self
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd { hi: s1, lo: s2 }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (s, t) = quick_two_sum(p, e);
        Dd { hi: s, lo: t }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        // Long division with three correction passes.
        let q1 = self.hi / rhs.hi;
        let mut r = self - rhs.mul_f64(q1);
        let q2 = r.hi / rhs.hi;
        r = r - rhs.mul_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e + q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}
