// SPDX-License-Identifier: Apache-2.0

//! Greedy shrinking from Baseline-Max.
//!
//! FIFOs are visited from the largest to the smallest peak occupancy seen
//! at Baseline-Max (ties by id). Each is dropped to its smallest breakpoint
//! and kept there only if the run stays deadlock-free within
//! `(1 + epsilon)` of the baseline latency.

use alloc::vec::Vec;

use super::{baseline_max, EvaluatedPoint, OptimizeError, SearchBudget, Session};
use crate::memory;
use crate::trace::FifoConfig;

pub(crate) fn run(session: &mut Session<'_>, budget: &SearchBudget) -> Result<Option<EvaluatedPoint>, OptimizeError> {
    let program = session.program();
    let (base, result) = session.evaluate_one(baseline_max(program))?;
    let Some(base_latency) = base.latency else {
        return Ok(None);
    };
    let limit = base_latency as f64 * (1.0 + budget.epsilon);

    let mut order: Vec<usize> = (0..program.fifo_count()).collect();
    order.sort_by(|&a, &b| {
        result.peak_occupancy[b]
            .cmp(&result.peak_occupancy[a])
            .then(a.cmp(&b))
    });

    let mut current = base;
    for fifo in order {
        if session.remaining() == 0 {
            break;
        }
        let decl = &program.fifos()[fifo];
        let smallest = memory::breakpoints(decl.width, program.upper_bound(fifo))[0];
        if current.config.depths()[fifo] == smallest {
            continue;
        }
        let mut depths = current.config.depths().to_vec();
        depths[fifo] = smallest;
        let (trial, _) = session.evaluate_one(FifoConfig::from_trusted(depths))?;
        if trial.latency.is_some_and(|l| l as f64 <= limit) {
            current = trial;
        }
    }
    Ok(Some(current))
}
