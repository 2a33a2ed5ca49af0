//! Renewal decision-epoch processes.
//!
//! Each player becomes ready to act at epochs `S_0 <= S_1 <= ...` where
//! `S_0` is an initial delay and subsequent increments are i.i.d. cycle
//! draws. Paths are sampled up to (and including) the first epoch at or
//! beyond a horizon — exactly the prefix the exit analysis needs.

use alloc::vec::Vec;

use crate::rng::Stream;
use crate::{Error, Result};

/// Law of an initial delay or cycle duration.
#[derive(Clone, Debug, PartialEq)]
#[non_exhaustive]
pub enum Distribution {
    /// A fixed duration (nonnegative; 0 is allowed for delays but makes a
    /// degenerate cycle).
    Deterministic {
        /// The fixed duration.
        value: f64,
    },
    /// Exponential with the given rate (mean `1/rate`).
    Exponential {
        /// Rate parameter, strictly positive.
        rate: f64,
    },
}

impl Distribution {
    /// Checks parameter constraints.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] for a negative or non-finite deterministic value,
    /// or a non-positive or non-finite rate.
    pub fn validate(&self) -> Result<()> {
        match self {
            Distribution::Deterministic { value } => {
                if !value.is_finite() || *value < 0.0 {
                    return Err(Error::domain(
                        "deterministic duration must be finite and >= 0",
                    ));
                }
            }
            Distribution::Exponential { rate } => {
                if !rate.is_finite() || *rate <= 0.0 {
                    return Err(Error::domain("exponential rate must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    /// Expected value of the law.
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Deterministic { value } => *value,
            Distribution::Exponential { rate } => 1.0 / rate,
        }
    }

    /// True when every draw is the same value (deterministic law).
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Distribution::Deterministic { .. })
    }

    /// Draws one duration.
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        match self {
            Distribution::Deterministic { value } => *value,
            Distribution::Exponential { rate } => stream.next_exponential(*rate),
        }
    }
}

/// A player's renewal specification: initial delay plus i.i.d. cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct RenewalSpec {
    /// Law of the first epoch `S_0`.
    pub initial_delay: Distribution,
    /// Law of every later increment.
    pub cycle: Distribution,
}

impl RenewalSpec {
    /// Validates and builds a specification.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] if either distribution has invalid parameters.
    /// (A zero deterministic cycle passes here — it is a valid law — but
    /// any attempt to sample a path with it reports
    /// [`Error::DegenerateRenewal`].)
    pub fn new(initial_delay: Distribution, cycle: Distribution) -> Result<RenewalSpec> {
        initial_delay.validate()?;
        cycle.validate()?;
        Ok(RenewalSpec {
            initial_delay,
            cycle,
        })
    }

    /// Expected cycle duration `E[increment]`.
    pub fn mean_cycle(&self) -> f64 {
        self.cycle.mean()
    }
}

/// A realized epoch path truncated at its first epoch at or beyond the
/// sampling horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochPath {
    /// Epoch times `S_0, S_1, ...`; nondecreasing, with exactly the last
    /// element at or beyond the horizon it was sampled for.
    pub times: Vec<f64>,
}

impl EpochPath {
    /// The final (largest) epoch.
    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
}

/// Samples one epoch path up to the first epoch `>= horizon` (inclusive).
///
/// The path always contains at least `S_0`; when the delay itself reaches
/// the horizon the path is that single element.
///
/// # Errors
///
/// [`Error::DegenerateRenewal`] when the cycle is deterministic 0 and the
/// horizon lies beyond the initial delay, so the path could never
/// terminate.
pub fn sample_path(spec: &RenewalSpec, horizon: f64, stream: &mut Stream) -> Result<EpochPath> {
    let mut times = Vec::new();
    let mut t = spec.initial_delay.sample(stream);
    times.push(t);
    if t >= horizon {
        return Ok(EpochPath { times });
    }
    if matches!(spec.cycle, Distribution::Deterministic { value } if value == 0.0) {
        return Err(Error::DegenerateRenewal);
    }
    loop {
        t += spec.cycle.sample(stream);
        times.push(t);
        if t >= horizon {
            return Ok(EpochPath { times });
        }
    }
}
