//! Core solver for two-player stochastic timing duels.
//!
//! Both players repeatedly become ready to act at random renewal epochs and
//! hold identical success thresholds; the player whose epoch process first
//! crosses the shared optimal moment `t*` wins the exchange. This crate
//! provides:
//!
//! - success-probability curves and the optimal crossing moment
//!   ([`curves`], [`engine::compute_t_star`]),
//! - renewal decision-epoch sampling ([`renewal`]) with reproducible
//!   per-replication streams ([`rng`]),
//! - a Monte Carlo engine for exit/pre-exit times and win probabilities
//!   ([`engine`]),
//! - the closed-form joint exit functional and its Laplace-Carson transform
//!   machinery, with numerical inversion and moment extraction
//!   ([`transform`], [`laplace`], [`functional`], [`moments`]),
//! - the classical alternating-turn duel special case ([`classic`]),
//! - a bundled reference scenario ([`case_study`]).
//!
//! The crate is `no_std` (with `alloc`) so the numeric core can be embedded;
//! all IO, file formats, and the command line live in the companion
//! `duel-cli` crate.
//!
//! ```
//! use duel_core::case_study::run_case_study;
//! use duel_core::engine::simulate;
//!
//! // The bundled reference duel is fully deterministic: player A exits at
//! // month 18 after 3 cycles, player B at month 21 after 4, so A wins.
//! let report = run_case_study();
//! assert_eq!((report.mu, report.nu), (3, 4));
//! assert_eq!(report.unconditional.e_s_mu.mean, 18.0);
//! assert_eq!(report.unconditional.e_t_nu.mean, 21.0);
//! assert_eq!(report.win_prob_a.mean, 1.0);
//!
//! // Simulation reaches the same exact numbers along the sampling path.
//! let scenario = duel_core::case_study::case_study_scenario();
//! let simulated = simulate(&scenario, 10_000, 7).unwrap();
//! assert_eq!(simulated.unconditional.e_s_mu.mean, 18.0);
//! ```

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod case_study;
pub mod classic;
pub mod curves;
pub mod dd;
pub mod engine;
mod error;
pub mod functional;
pub mod laplace;
pub mod moments;
pub mod renewal;
pub mod rng;
pub mod transform;

pub use error::Error;

/// Convenience alias for results carrying this crate's [`Error`].
pub type Result<T> = core::result::Result<T, Error>;
