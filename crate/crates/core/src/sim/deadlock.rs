// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use super::{BlockReason, BlockedTask, SimError, SimResult};
use crate::trace::{TaskId, TraceProgram};

/// Explanation of a stalled run in terms of who waits on whom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WaitFor {
    /// Tasks waiting on each other in a ring. Each entry waits on the task
    /// of the next entry; the last waits on the first. Starts at the lowest
    /// task id in the ring.
    Cycle(Vec<BlockedTask>),
    /// No ring exists: some blocked task waits on a task that already
    /// finished (a writer whose reader will never drain the FIFO). Lists
    /// every blocked task.
    Starvation(Vec<BlockedTask>),
}

/// Builds the wait-for graph of a deadlocked run and extracts a ring.
///
/// A blocked writer waits on the FIFO's consumer, a blocked reader on its
/// producer. Every blocked task has exactly one outgoing edge, so walking
/// from each blocked task either closes a ring or reaches a finished task.
pub fn detect_deadlock_cycle(result: &SimResult, program: &TraceProgram) -> Result<WaitFor, SimError> {
    let info = match (&result.deadlock, result.deadlocked) {
        (Some(info), true) => info,
        _ => return Err(SimError::NotDeadlocked),
    };
    let mut edge: Vec<Option<BlockedTask>> = alloc::vec![None; program.task_count()];
    for b in &info.blocked {
        edge[b.task] = Some(*b);
    }
    let waits_on = |b: &BlockedTask| -> Option<TaskId> {
        let fifo = &program.fifos()[b.fifo];
        match b.reason {
            BlockReason::Full => fifo.consumer(),
            BlockReason::Empty => fifo.producer(),
        }
    };

    for start in &info.blocked {
        let mut path: Vec<TaskId> = Vec::new();
        let mut current = start.task;
        loop {
            if let Some(pos) = path.iter().position(|&t| t == current) {
                let ring = &path[pos..];
                let first = ring
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &t)| t)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                let chain = ring[first..]
                    .iter()
                    .chain(&ring[..first])
                    .map(|&t| edge[t].expect("ring members are blocked"))
                    .collect();
                return Ok(WaitFor::Cycle(chain));
            }
            let Some(b) = edge[current] else { break };
            path.push(current);
            match waits_on(&b) {
                Some(next) => current = next,
                None => break,
            }
        }
    }
    Ok(WaitFor::Starvation(info.blocked.clone()))
}
