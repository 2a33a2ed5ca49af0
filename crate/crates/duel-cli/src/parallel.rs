//! Multi-threaded replication with results bit-identical to the serial
//! engine.
//!
//! Each replication's random stream is keyed by `(seed, index)`, so
//! outcomes do not depend on which thread produced them; this driver hands
//! contiguous index ranges to scoped threads, reassembles the outcomes in
//! index order, and aggregates with the same compensated fold the serial
//! path uses. The report is therefore byte-for-byte the same for any thread
//! count.

use std::thread;

use duel_core::engine::{self, DecisionReport, DuelScenario, RepOutcome, ReportMode};
use duel_core::{Error, Result};

/// Worker-thread default: all available cores (1 if that cannot be
/// determined).
pub fn available_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Monte Carlo run of `replications` replications under `seed`, spread over
/// at most `threads` worker threads. Produces exactly the report of
/// [`engine::simulate`] with the same arguments.
///
/// # Errors
///
/// [`Error::Domain`] for zero replications; scenario resolution and path
/// sampling errors.
pub fn simulate_parallel(
    scenario: &DuelScenario,
    replications: u64,
    seed: u64,
    threads: usize,
) -> Result<DecisionReport> {
    // The serial engine also handles fully deterministic scenarios, which
    // collapse to a single exact replication.
    if threads <= 1 || replications <= 1 || scenario.is_fully_deterministic() {
        return engine::simulate(scenario, replications, seed);
    }
    let t_star = scenario.resolve_t_star()?;
    let thresholds = scenario.resolve_thresholds()?;

    let total = usize::try_from(replications)
        .map_err(|_| Error::domain("replication count exceeds the address space"))?;
    let workers = threads.min(total);
    let chunk = total.div_ceil(workers);
    let mut slots: Vec<Option<Result<RepOutcome>>> = vec![None; total];
    thread::scope(|scope| {
        for (worker, slice) in slots.chunks_mut(chunk).enumerate() {
            let start = worker * chunk;
            scope.spawn(move || {
                for (offset, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(engine::replicate(
                        scenario,
                        thresholds,
                        seed,
                        (start + offset) as u64,
                    ));
                }
            });
        }
    });

    let mut outcomes = Vec::with_capacity(total);
    for slot in slots {
        outcomes.push(slot.expect("every index was assigned to a worker")?);
    }
    Ok(engine::aggregate(
        scenario,
        t_star,
        thresholds,
        ReportMode::MonteCarlo,
        &outcomes,
    ))
}
