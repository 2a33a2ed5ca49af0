//! Bivariate Laplace-Carson transform pair: forward by adaptive quadrature
//! (a test oracle) and inverse by nested Gaver-Stehfest summation.
//!
//! The Carson convention multiplies the plain Laplace transform by `uv`, so
//! constants map to constants. Under that convention the Gaver-Stehfest
//! inverse of a transform `F` needs no kernel factor at all:
//!
//! `f(p, q) ~= sum_{k,l} W_k W_l F(k ln2 / p, l ln2 / q)`, `W_k = V_k / k`,
//!
//! where `V_k` are the classical Stehfest coefficients of even order `N`.
//! The weights alternate in sign and grow to ~`5e11` at order 20 while the
//! sum cancels to order unity, so the whole inversion runs on
//! [`Dd`](crate::dd::Dd) values; weights are assembled from exact `u128`
//! integer terms (every inner term is positive — no cancellation before
//! the final signed sum).

use alloc::vec::Vec;

use crate::dd::{Dd, LN2};
use crate::{Error, Result};

/// Default inversion order: accurate to roughly 1e-6 relative for smooth
/// transforms away from kinks.
pub const DEFAULT_ORDER: usize = 14;

/// Inclusive range of supported inversion orders (must also be even).
pub const ORDER_RANGE: (usize, usize) = (8, 20);

/// Result of one inversion, with its order-agreement diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inversion {
    /// Inverted value at the requested order.
    pub value: f64,
    /// Order used for `value`.
    pub order: usize,
    /// Value recomputed with order reduced by 2 (same evaluation grid).
    pub lower_order_value: f64,
    /// Relative gap between the two orders.
    pub order_disagreement: f64,
    /// True when the gap exceeds `1e-3`: the sequence is not settling and
    /// `value` should not be trusted to the usual accuracy.
    pub warning: bool,
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn checked_order(order: usize) -> Result<usize> {
    if order % 2 != 0 || order < ORDER_RANGE.0 || order > ORDER_RANGE.1 {
        return Err(Error::domain(alloc::format!(
            "inversion order must be even and within [{}, {}], got {order}",
            ORDER_RANGE.0,
            ORDER_RANGE.1
        )));
    }
    Ok(order)
}

/// Summation weights `W_k = V_k / k` for `k = 1..=order`.
///
/// Each inner-sum term `j^n (2j)! / ((n-j)! j! (j-1)! (k-j)! (2j-k)!)` is
/// computed as an exact `u128` ratio (numerator below `2^95` for order 20)
/// and accumulated in double-double, so the returned weights are correct to
/// full `Dd` precision.
///
/// # Errors
///
/// [`Error::Domain`] for an odd or out-of-range order.
pub fn stehfest_weights(order: usize) -> Result<Vec<Dd>> {
    let order = checked_order(order)?;
    let n = order / 2;
    let mut weights = Vec::with_capacity(order);
    for k in 1..=order {
        let mut sum = Dd::ZERO;
        let j_lo = k.div_ceil(2);
        let j_hi = k.min(n);
        for j in j_lo..=j_hi {
            let mut numerator: u128 = factorial_u128(2 * j);
            for _ in 0..n {
                numerator *= j as u128;
            }
            let denominator = factorial_u128(n - j)
                * factorial_u128(j)
                * factorial_u128(j - 1)
                * factorial_u128(k - j)
                * factorial_u128(2 * j - k);
            sum = sum + Dd::from_u128(numerator) / Dd::from_u128(denominator);
        }
        let signed = if (n + k) % 2 == 0 { sum } else { -sum };
        weights.push(signed.div_f64(k as f64));
    }
    Ok(weights)
}

/// Inverts a Laplace-Carson transform at `(p, q)` by nested Gaver-Stehfest
/// summation at `order`, and reports how much the value moves when the
/// order drops by 2 (an oscillation/instability diagnostic).
///
/// The transform is evaluated once on the `order x order` node grid
/// `(k ln2 / p, l ln2 / q)`; both order sums reuse those values. Supply the
/// transform in double-double if you can — a plain-`f64` closure caps the
/// attainable accuracy at roughly `(sum|W|)^2 * 1e-16`.
///
/// # Errors
///
/// [`Error::Domain`] for non-positive `p`/`q` or a bad order; transform
/// evaluation errors are propagated.
pub fn lc_inverse<F>(mut transform: F, p: f64, q: f64, order: usize) -> Result<Inversion>
where
    F: FnMut(Dd, Dd) -> Result<Dd>,
{
    let order = checked_order(order)?;
    if !p.is_finite() || !q.is_finite() || p <= 0.0 || q <= 0.0 {
        return Err(Error::domain("inversion point must have p > 0 and q > 0"));
    }
    let weights = stehfest_weights(order)?;
    let lower = stehfest_weights(order - 2).unwrap_or_else(|_| {
        // order - 2 == 6 only when order == 8; same formula, below the
        // public range, still well-defined.
        stehfest_weights_unchecked(order - 2)
    });
    let mut values = Vec::with_capacity(order * order);
    for k in 1..=order {
        let u = LN2.mul_f64(k as f64).div_f64(p);
        for l in 1..=order {
            let v = LN2.mul_f64(l as f64).div_f64(q);
            values.push(transform(u, v)?);
        }
    }
    let weighted = |w: &[Dd]| -> Dd {
        let m = w.len();
        let mut total = Dd::ZERO;
        for k in 0..m {
            let mut row = Dd::ZERO;
            for l in 0..m {
                row = row + w[l] * values[k * order + l];
            }
            total = total + w[k] * row;
        }
        total
    };
    let value = weighted(&weights).to_f64();
    let lower_order_value = weighted(&lower).to_f64();
    let scale = value.abs().max(lower_order_value.abs()).max(1e-12);
    let order_disagreement = (value - lower_order_value).abs() / scale;
    Ok(Inversion {
        value,
        order,
        lower_order_value,
        order_disagreement,
        warning: order_disagreement > 1e-3,
    })
}

/// Same weight construction without the public range check (internal use
/// for the order-minus-2 diagnostic).
fn stehfest_weights_unchecked(order: usize) -> Vec<Dd> {
    let n = order / 2;
    let mut weights = Vec::with_capacity(order);
    for k in 1..=order {
        let mut sum = Dd::ZERO;
        for j in k.div_ceil(2)..=k.min(n) {
            let mut numerator: u128 = factorial_u128(2 * j);
            for _ in 0..n {
                numerator *= j as u128;
            }
            let denominator = factorial_u128(n - j)
                * factorial_u128(j)
                * factorial_u128(j - 1)
                * factorial_u128(k - j)
                * factorial_u128(2 * j - k);
            sum = sum + Dd::from_u128(numerator) / Dd::from_u128(denominator);
        }
        let signed = if (n + k) % 2 == 0 { sum } else { -sum };
        weights.push(signed.div_f64(k as f64));
    }
    weights
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
///
/// Returns `(integral, error_bound)`; panels that hit the depth cap
/// contribute their last correction to the error bound instead of refining
/// further.
#[allow(clippy::too_many_arguments)] // recursion state, not an interface
fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h6 = (b - a) / 12.0;
    let left = h6 * (fa + 4.0 * flm + fm);
    let right = h6 * (fm + 4.0 * frm + fb);
    let correction = (left + right - whole) / 15.0;
    if correction.abs() <= tol || depth == 0 {
        return (left + right + correction, correction.abs());
    }
    let (vl, el) = adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let (vr, er) = adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    (vl + vr, el + er)
}

pub(crate) fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 44)
}

/// Forward Laplace-Carson transform `uv * integral of e^{-up-vq} f(p,q)`
/// by nested adaptive Simpson quadrature — the oracle against which the
/// inverter is tested.
///
/// The substitution `x = e^{-up}` (and likewise for `q`) maps the plane to
/// the unit square and folds the kernel and `uv` prefactor into the
/// measure, so only `f` is evaluated.
///
/// # Errors
///
/// [`Error::Domain`] for non-positive `u`, `v`, or `tol`;
/// [`Error::Accuracy`] when the quadrature cannot certify `10 * tol` (the
/// message carries the achieved estimate).
pub fn lc_forward<F>(f: F, u: f64, v: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if !u.is_finite() || !v.is_finite() || u <= 0.0 || v <= 0.0 {
        return Err(Error::domain("transform variables must be positive"));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    let p_of = |x: f64| -libm::log(x.max(1e-300)) / u;
    let q_of = |y: f64| -libm::log(y.max(1e-300)) / v;
    let mut worst_inner = 0.0_f64;
    let outer = |x: f64| {
        let p = p_of(x);
        let inner = |y: f64| f(p, q_of(y));
        integrate_adaptive(&inner, 0.0, 1.0, tol * 0.05).0
    };
    // First pass: estimate; track inner error once on a coarse probe.
    for &x in &[1e-6, 0.25, 0.5, 0.75, 1.0] {
        let p = p_of(x);
        let inner = |y: f64| f(p, q_of(y));
        worst_inner = worst_inner.max(integrate_adaptive(&inner, 0.0, 1.0, tol * 0.05).1);
    }
    let (value, outer_err) = integrate_adaptive(&outer, 0.0, 1.0, tol);
    let total_err = outer_err + worst_inner;
    if total_err > 10.0 * tol {
        return Err(Error::accuracy(alloc::format!(
            "forward quadrature achieved {total_err:.3e} (> 10x tolerance {tol:.1e}); estimate {value:.12e}"
        )));
    }
    Ok(value)
}
