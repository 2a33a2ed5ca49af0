//! IO companion for [`duel_core`]: scenario files, report emission, a
//! deterministic parallel simulation driver, a transform self-test, and the
//! `duel` command line.
//!
//! The numeric core is `no_std`; everything that touches files, threads, or
//! a terminal lives here:
//!
//! - [`scenario`] — the JSON scenario format with line-anchored load-time
//!   validation and the inverse emitter,
//! - [`report`] — decision reports as a human table, key-stable JSON, or
//!   CSV,
//! - [`parallel`] — multi-threaded replication with results bit-identical
//!   to the serial engine,
//! - [`selftest`] — round-trip checks of the transform pipeline against
//!   closed-form pairs,
//! - [`cli`] — the `duel` binary's argument surface and dispatch.
//!
//! ```
//! use duel_cli::report::{emit_report, ReportFormat};
//! use duel_cli::scenario::{emit_scenario, load_scenario};
//!
//! let text = r#"{
//!   "schema_version": 1,
//!   "time_unit": "months",
//!   "player_a": {
//!     "initial_delay": { "kind": "deterministic", "value": 0.0 },
//!     "cycle": { "kind": "deterministic", "value": 6.0 }
//!   },
//!   "player_b": {
//!     "initial_delay": { "kind": "deterministic", "value": 5.0 },
//!     "cycle": { "kind": "deterministic", "value": 4.0 }
//!   },
//!   "t_star": 17.95,
//!   "mode": "deterministic"
//! }"#;
//! let file = load_scenario(text).unwrap();
//! // Loading what we emit restores the identical scenario.
//! assert_eq!(load_scenario(&emit_scenario(&file)).unwrap(), file);
//!
//! let report = duel_core::engine::simulate(&file.to_duel(), 1, 0).unwrap();
//! assert!(emit_report(&report, ReportFormat::Human).contains("t_star"));
//! ```

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod cli;
pub mod parallel;
pub mod report;
pub mod scenario;
pub mod selftest;
