//! The distance-indexed duel with shared deterministic steps: both players
//! walk the same step sequence, hit probabilities grow with the step, a
//! miss forfeits the duel to the opponent, and turns alternate. Provides
//! the threshold shooting rule, an exhaustive backward-induction solver to
//! audit it against, and an exact rational scalar so grid sweeps are free
//! of floating-point tie artifacts.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use crate::{Error, Result};

/// Duel participant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    /// First player (moves first under [`TurnOrder::AFirst`]).
    A,
    /// Second player.
    B,
}

/// Who moves on odd steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TurnOrder {
    /// Player A moves on steps 1, 3, 5, ...
    AFirst,
    /// Player B moves on steps 1, 3, 5, ...
    BFirst,
}

impl TurnOrder {
    fn mover(self, step: usize) -> Player {
        let odd = step % 2 == 1;
        match (self, odd) {
            (TurnOrder::AFirst, true) | (TurnOrder::BFirst, false) => Player::A,
            _ => Player::B,
        }
    }
}

/// Arithmetic the solvers run on: `f64` for everyday use, [`Ratio`] for
/// exact grid sweeps.
pub trait Scalar:
    Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Sized
{
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
}

impl Scalar for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
}

/// Exact rational with `i128` numerator and positive denominator, kept
/// reduced. Sized for probability-grid work: every cross-multiplication in
/// a tenths-grid duel of a dozen steps stays far below the `i128` range,
/// and the operators use checked arithmetic so an overflow fails loudly
/// instead of corrupting a comparison.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub struct Ratio {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Ratio {
    /// Reduced rational `num / den`.
    ///
    /// # Panics
    ///
    /// Panics when `den` is zero.
    pub fn new(num: i128, den: i128) -> Ratio {
        assert!(den != 0, "rational denominator must be nonzero");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    /// The value `k / 10`, the grid the sweep suites enumerate.
    pub fn tenths(k: i128) -> Ratio {
        Ratio::new(k, 10)
    }

    /// Numerator of the reduced form.
    pub fn numer(self) -> i128 {
        self.num
    }

    /// Denominator of the reduced form (always positive).
    pub fn denom(self) -> i128 {
        self.den
    }

    /// Nearest `f64`.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Add for Ratio {
    type Output = Ratio;
    fn add(self, rhs: Ratio) -> Ratio {
        let num = self
            .num
            .checked_mul(rhs.den)
            .and_then(|l| rhs.num.checked_mul(self.den).and_then(|r| l.checked_add(r)))
            .expect("rational addition overflow");
        Ratio::new(num, self.den.checked_mul(rhs.den).expect("rational overflow"))
    }
}

impl Sub for Ratio {
    type Output = Ratio;
    fn sub(self, rhs: Ratio) -> Ratio {
        self + Ratio::new(-rhs.num, rhs.den)
    }
}

impl Mul for Ratio {
    type Output = Ratio;
    fn mul(self, rhs: Ratio) -> Ratio {
        Ratio::new(
            self.num.checked_mul(rhs.num).expect("rational overflow"),
            self.den.checked_mul(rhs.den).expect("rational overflow"),
        )
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        let lhs = self.num.checked_mul(other.den).expect("rational overflow");
        let rhs = other.num.checked_mul(self.den).expect("rational overflow");
        lhs.cmp(&rhs)
    }
}

impl Scalar for Ratio {
    fn zero() -> Ratio {
        Ratio { num: 0, den: 1 }
    }
    fn one() -> Ratio {
        Ratio { num: 1, den: 1 }
    }
}

/// A duel instance: per-step hit probabilities for both players, indexed
/// by step 1..=N in the solvers' documentation and 0-based internally.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalDuel<T> {
    p_a: Vec<T>,
    p_b: Vec<T>,
}

impl<T: Scalar> ClassicalDuel<T> {
    /// Validates equal-length, nonempty, nondecreasing sequences in [0, 1].
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] on any violated invariant.
    pub fn new(p_a: Vec<T>, p_b: Vec<T>) -> Result<ClassicalDuel<T>> {
        if p_a.is_empty() || p_a.len() != p_b.len() {
            return Err(Error::domain(
                "hit-probability sequences must be nonempty and of equal length",
            ));
        }
        for seq in [&p_a, &p_b] {
            for (i, p) in seq.iter().enumerate() {
                if !(*p >= T::zero() && *p <= T::one()) {
                    return Err(Error::domain("hit probabilities must lie in [0, 1]"));
                }
                if i > 0 && *p < seq[i - 1] {
                    return Err(Error::domain(
                        "hit probabilities must be nondecreasing in the step",
                    ));
                }
            }
        }
        Ok(ClassicalDuel { p_a, p_b })
    }

    /// Number of steps N.
    pub fn steps(&self) -> usize {
        self.p_a.len()
    }

    /// Player A's hit probability at 1-based `step`.
    pub fn hit_a(&self, step: usize) -> &T {
        &self.p_a[step - 1]
    }

    /// Player B's hit probability at 1-based `step`.
    pub fn hit_b(&self, step: usize) -> &T {
        &self.p_b[step - 1]
    }
}

/// First step at which the hit probabilities sum to at least one.
///
/// # Errors
///
/// [`Error::NoCrossing`] when the sum never reaches one by the final step.
pub fn threshold_step<T: Scalar>(duel: &ClassicalDuel<T>) -> Result<usize> {
    for step in 1..=duel.steps() {
        if duel.hit_a(step).clone() + duel.hit_b(step).clone() >= T::one() {
            return Ok(step);
        }
    }
    Err(Error::NoCrossing)
}

/// Backward-induction solution of one duel under one turn order.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    /// First step at which the mover shoots under rational play, with the
    /// mover; `None` when waiting through every step is optimal.
    pub first_shot: Option<(usize, Player)>,
    /// Player A's win probability under rational play.
    pub value_a: T,
    /// Player B's win probability under rational play.
    pub value_b: T,
}

/// Solves the duel from the final step backward. The mover at each step
/// shoots exactly when shooting wins strictly more than waiting (a miss
/// forfeits to the opponent, so shooting is worth its hit probability and
/// concedes the complement); the game after an untaken final step is worth
/// nothing to either player.
pub fn backward_induction<T: Scalar>(duel: &ClassicalDuel<T>, order: TurnOrder) -> Solution<T> {
    let mut value_a = T::zero();
    let mut value_b = T::zero();
    let mut first_shot = None;
    for step in (1..=duel.steps()).rev() {
        let mover = order.mover(step);
        let p = match mover {
            Player::A => duel.hit_a(step).clone(),
            Player::B => duel.hit_b(step).clone(),
        };
        let wait_own = match mover {
            Player::A => value_a.clone(),
            Player::B => value_b.clone(),
        };
        if p > wait_own {
            let concede = T::one() - p.clone();
            (value_a, value_b) = match mover {
                Player::A => (p, concede),
                Player::B => (concede, p),
            };
            first_shot = Some((step, mover));
        }
    }
    Solution {
        first_shot,
        value_a,
        value_b,
    }
}

/// The threshold shooting rule with the rational-play winner: the first
/// step where the hit probabilities sum to one, and whichever player holds
/// the larger backward-induction value under the A-first order (ties go to
/// player A).
///
/// # Errors
///
/// [`Error::NoCrossing`] when the probabilities never sum to one.
pub fn classical_duel<T: Scalar>(duel: &ClassicalDuel<T>) -> Result<(usize, Player)> {
    let step = threshold_step(duel)?;
    let solution = backward_induction(duel, TurnOrder::AFirst);
    let winner = if solution.value_a >= solution.value_b {
        Player::A
    } else {
        Player::B
    };
    Ok((step, winner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tenths_duel(a: &[i128], b: &[i128]) -> ClassicalDuel<Ratio> {
        ClassicalDuel::new(
            a.iter().map(|&k| Ratio::tenths(k)).collect(),
            b.iter().map(|&k| Ratio::tenths(k)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn ratio_arithmetic_and_ordering() {
        let half = Ratio::new(1, 2);
        let tenth = Ratio::tenths(1);
        assert_eq!(half + tenth, Ratio::new(3, 5));
        assert_eq!(Ratio::new(2, -4), Ratio::new(-1, 2));
        assert_eq!((Ratio::one() - Ratio::new(3, 10)).numer(), 7);
        assert!(Ratio::new(7, 10) > Ratio::new(69, 100));
        assert_eq!(Ratio::new(3, 10) * Ratio::new(10, 3), Ratio::one());
        assert_eq!(Ratio::tenths(5).to_f64(), 0.5);
    }

    #[test]
    fn symmetric_tenths_example() {
        let grid: Vec<i128> = (1..=10).collect();
        let duel = tenths_duel(&grid, &grid);
        assert_eq!(threshold_step(&duel).unwrap(), 5);
        let solution = backward_induction(&duel, TurnOrder::AFirst);
        assert_eq!(solution.first_shot, Some((5, Player::A)));
        assert_eq!(solution.value_a, Ratio::new(1, 2));
        assert_eq!(solution.value_b, Ratio::new(1, 2));
        assert_eq!(classical_duel(&duel).unwrap(), (5, Player::A));
    }

    #[test]
    fn asymmetric_tenths_twentieths_example() {
        let a: Vec<Ratio> = (1..=10).map(|k| Ratio::new(k, 10)).collect();
        let b: Vec<Ratio> = (1..=10).map(|k| Ratio::new(k, 20)).collect();
        let duel = ClassicalDuel::new(a, b).unwrap();
        assert_eq!(threshold_step(&duel).unwrap(), 7);

        let a_first = backward_induction(&duel, TurnOrder::AFirst);
        assert_eq!(a_first.first_shot, Some((7, Player::A)));
        assert_eq!(a_first.value_a, Ratio::new(7, 10));
        assert_eq!(a_first.value_b, Ratio::new(3, 10));

        let b_first = backward_induction(&duel, TurnOrder::BFirst);
        assert_eq!(b_first.first_shot, Some((7, Player::B)));
        assert_eq!(b_first.value_a, Ratio::new(13, 20));
        assert_eq!(b_first.value_b, Ratio::new(7, 20));

        assert_eq!(classical_duel(&duel).unwrap(), (7, Player::A));
    }

    #[test]
    fn single_step_crossing() {
        let duel = ClassicalDuel::new(vec![0.5], vec![0.5]).unwrap();
        assert_eq!(threshold_step(&duel).unwrap(), 1);
        let solution = backward_induction(&duel, TurnOrder::AFirst);
        assert_eq!(solution.first_shot, Some((1, Player::A)));
        assert_eq!(classical_duel(&duel).unwrap(), (1, Player::A));
    }

    #[test]
    fn threshold_and_induction_can_disagree() {
        // A sharp second step makes waiting fatal: the mover at step 1
        // shoots even though the probabilities only sum to 0.9 there.
        let duel = tenths_duel(&[5, 10], &[4, 10]);
        assert_eq!(threshold_step(&duel).unwrap(), 2);
        for order in [TurnOrder::AFirst, TurnOrder::BFirst] {
            let solution = backward_induction(&duel, order);
            let (step, _) = solution.first_shot.unwrap();
            assert_eq!(step, 1, "order {order:?}");
        }
    }

    #[test]
    fn nobody_shoots_when_shooting_cannot_beat_waiting() {
        // A's only shot always misses; B's always hits. A waits (zero
        // either way, strict preference keeps the gun down), and B never
        // gets a turn.
        let duel = tenths_duel(&[0], &[10]);
        assert_eq!(threshold_step(&duel).unwrap(), 1);
        let solution = backward_induction(&duel, TurnOrder::AFirst);
        assert_eq!(solution.first_shot, None);
        assert_eq!(solution.value_a, Ratio::zero());
        assert_eq!(solution.value_b, Ratio::zero());
        assert_eq!(classical_duel(&duel).unwrap(), (1, Player::A));
    }

    #[test]
    fn no_crossing_is_an_error() {
        let duel = ClassicalDuel::new(vec![0.1, 0.2], vec![0.1, 0.2]).unwrap();
        assert!(matches!(threshold_step(&duel), Err(Error::NoCrossing)));
        assert!(classical_duel(&duel).is_err());
    }

    #[test]
    fn validation_rejects_bad_sequences() {
        assert!(ClassicalDuel::<f64>::new(vec![], vec![]).is_err());
        assert!(ClassicalDuel::new(vec![0.5], vec![0.5, 0.6]).is_err());
        assert!(ClassicalDuel::new(vec![0.5, 0.4], vec![0.5, 0.6]).is_err());
        assert!(ClassicalDuel::new(vec![-0.1, 0.4], vec![0.5, 0.6]).is_err());
        assert!(ClassicalDuel::new(vec![0.5, 1.1], vec![0.5, 0.6]).is_err());
    }

    /// Enumerates all nondecreasing tenths sequences of length `n`.
    fn nondecreasing_grids(n: usize) -> Vec<Vec<i128>> {
        let mut out = Vec::new();
        let mut current = vec![0i128; n];
        fn recurse(pos: usize, low: i128, current: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
            if pos == current.len() {
                out.push(current.clone());
                return;
            }
            for k in low..=10 {
                current[pos] = k;
                recurse(pos + 1, k, current, out);
            }
        }
        recurse(0, 0, &mut current, &mut out);
        out
    }

    #[test]
    fn exhaustive_tenths_sweep_counts_disagreements() {
        // The threshold rule and backward induction disagree on a sizable
        // share of monotone tenths grids; these counts document the gap
        // the acceptance audit reports.
        let expected = [(2usize, 3641u64, 1065u64), (3, 76791, 27149)];
        for (n, total_expected, mismatch_expected) in expected {
            let grids = nondecreasing_grids(n);
            let mut total = 0u64;
            let mut mismatches = 0u64;
            for pa in &grids {
                for pb in &grids {
                    let duel = tenths_duel(pa, pb);
                    let Ok(step) = threshold_step(&duel) else {
                        continue;
                    };
                    total += 1;
                    let bi = backward_induction(&duel, TurnOrder::AFirst)
                        .first_shot
                        .map(|(s, _)| s);
                    if bi != Some(step) {
                        mismatches += 1;
                    }
                }
            }
            assert_eq!(total, total_expected, "instances with a crossing, N={n}");
            assert_eq!(mismatches, mismatch_expected, "disagreements, N={n}");
        }
    }

    #[test]
    fn strictly_increasing_positive_grids_stay_within_one_step() {
        // On strictly increasing, strictly positive sequences the rational
        // first shot provably lands on the threshold step or one before.
        for n in [2usize, 3] {
            let grids: Vec<Vec<i128>> = nondecreasing_grids(n)
                .into_iter()
                .filter(|g| g[0] > 0 && g.windows(2).all(|w| w[0] < w[1]))
                .collect();
            for pa in &grids {
                for pb in &grids {
                    let duel = tenths_duel(pa, pb);
                    let Ok(step) = threshold_step(&duel) else {
                        continue;
                    };
                    for order in [TurnOrder::AFirst, TurnOrder::BFirst] {
                        let (shot, _) = backward_induction(&duel, order)
                            .first_shot
                            .expect("positive probabilities force a shot");
                        assert!(
                            shot == step || shot + 1 == step,
                            "pa={pa:?} pb={pb:?} order={order:?}: shot {shot} vs threshold {step}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn float_and_rational_solvers_agree_on_the_reference_examples() {
        let to_f64 = |g: &[i128]| g.iter().map(|&k| k as f64 / 10.0).collect::<Vec<_>>();
        for (pa, pb) in [
            ((1..=10).collect::<Vec<i128>>(), (1..=10).collect()),
            (vec![5, 10], vec![4, 10]),
            (vec![0], vec![10]),
        ] {
            let exact = tenths_duel(&pa, &pb);
            let float = ClassicalDuel::new(to_f64(&pa), to_f64(&pb)).unwrap();
            let exact_solution = backward_induction(&exact, TurnOrder::AFirst);
            let float_solution = backward_induction(&float, TurnOrder::AFirst);
            assert_eq!(exact_solution.first_shot, float_solution.first_shot);
            assert!(
                (exact_solution.value_a.to_f64() - float_solution.value_a).abs() < 1e-12
            );
        }
    }
}
