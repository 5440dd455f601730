// SPDX-License-Identifier: Apache-2.0

//! Event-driven replay.
//!
//! Channel operations of a single-producer single-consumer FIFO are totally
//! ordered on each side, so the `k`-th write and read times satisfy
//!
//! ```text
//! write[k] = max(ready, read[k - depth] + 1)   (k >= depth)
//! read[k]  = max(ready, write[k] + L)
//! ```
//!
//! Each task is run as far as those dependencies are known, then parked
//! until its partner on the blocking FIFO makes progress. No global clock
//! is kept.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_depths, read_latencies, BlockReason, BlockedTask, DeadlockInfo, SimError, SimResult, TimingMode};
use crate::trace::{OpKind, TraceProgram};

struct TaskState {
    pc: usize,
    /// Cycle at which the current op can first be attempted, or the finish
    /// cycle once all ops are done.
    time: u64,
    parked: bool,
}

pub fn run(program: &TraceProgram, depths: &[u32], mode: TimingMode) -> Result<SimResult, SimError> {
    check_depths(program, depths)?;
    let plans = program.plans();
    let n_fifos = program.fifo_count();
    let latency_of = read_latencies(program, depths, mode);

    let mut writes: Vec<Vec<u64>> = (0..n_fifos)
        .map(|f| Vec::with_capacity(program.write_count(f) as usize))
        .collect();
    let mut reads: Vec<Vec<u64>> = (0..n_fifos)
        .map(|f| Vec::with_capacity(program.read_count(f) as usize))
        .collect();
    let mut stall = vec![0u64; n_fifos];
    // Task parked on each side of a FIFO, if any.
    let mut parked_writer: Vec<Option<usize>> = vec![None; n_fifos];
    let mut parked_reader: Vec<Option<usize>> = vec![None; n_fifos];

    let mut tasks: Vec<TaskState> = plans
        .iter()
        .map(|p| TaskState {
            pc: 0,
            time: p.ops.first().map_or(p.tail, |op| op.delay),
            parked: false,
        })
        .collect();
    let mut ready: Vec<usize> = (0..tasks.len()).rev().collect();

    while let Some(id) = ready.pop() {
        let plan = &plans[id];
        let task = &mut tasks[id];
        task.parked = false;
        while task.pc < plan.ops.len() {
            let op = plan.ops[task.pc];
            let f = op.fifo as usize;
            let at = match op.kind {
                OpKind::Write => {
                    let k = writes[f].len();
                    let depth = depths[f] as usize;
                    let at = if k < depth {
                        task.time
                    } else if let Some(&freed) = reads[f].get(k - depth) {
                        task.time.max(freed + 1)
                    } else {
                        parked_writer[f] = Some(id);
                        task.parked = true;
                        break;
                    };
                    writes[f].push(at);
                    if let Some(reader) = parked_reader[f].take() {
                        ready.push(reader);
                    }
                    at
                }
                OpKind::Read => {
                    let k = reads[f].len();
                    let at = match writes[f].get(k) {
                        Some(&written) => task.time.max(written + latency_of[f]),
                        None => {
                            parked_reader[f] = Some(id);
                            task.parked = true;
                            break;
                        }
                    };
                    reads[f].push(at);
                    if let Some(writer) = parked_writer[f].take() {
                        ready.push(writer);
                    }
                    at
                }
            };
            stall[f] += at - task.time;
            task.pc += 1;
            task.time = at + 1 + plan.ops.get(task.pc).map_or(plan.tail, |next| next.delay);
        }
    }

    let latency = tasks.iter().map(|t| t.time).max().unwrap_or(0);
    let mut blocked = Vec::new();
    for (id, task) in tasks.iter().enumerate() {
        let plan = &plans[id];
        if task.pc < plan.ops.len() {
            let op = plan.ops[task.pc];
            let reason = match op.kind {
                OpKind::Write => BlockReason::Full,
                OpKind::Read => BlockReason::Empty,
            };
            stall[op.fifo as usize] += latency - task.time;
            blocked.push(BlockedTask {
                task: id,
                fifo: op.fifo as usize,
                reason,
            });
        }
    }

    let peak_occupancy = writes
        .iter()
        .zip(&reads)
        .map(|(w, r)| peak(w, r))
        .collect();
    let deadlocked = !blocked.is_empty();
    Ok(SimResult {
        latency,
        deadlocked,
        deadlock: deadlocked.then(|| DeadlockInfo {
            cycle: latency,
            blocked,
        }),
        peak_occupancy,
        stall_cycles: stall,
    })
}

/// Largest number of resident tokens. Occupancy only rises at writes, so it
/// is enough to look right after each one.
fn peak(writes: &[u64], reads: &[u64]) -> u32 {
    let mut freed = 0;
    let mut best = 0;
    for (k, &w) in writes.iter().enumerate() {
        while freed < reads.len() && reads[freed] + 1 <= w {
            freed += 1;
        }
        best = best.max(k + 1 - freed);
    }
    best as u32
}
