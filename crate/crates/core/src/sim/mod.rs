// SPDX-License-Identifier: Apache-2.0

//! Deterministic replay of a [`TraceProgram`] under a FIFO depth assignment.
//!
//! Timing rules, shared by the event-driven [`engine`] and the cycle-stepped
//! [`reference`]:
//!
//! * every task starts at cycle 0 and walks its events in order;
//! * `Compute(k)` advances the task's clock by `k`;
//! * a write at cycle `t` needs a free slot (occupancy below depth); the slot
//!   is taken from the cycle the write happens and the token is readable `L`
//!   cycles later;
//! * a read needs a readable token; its slot becomes free the cycle after
//!   the read;
//! * each read or write costs the task one cycle once it happens.
//!
//! `L` is 1, except in [`TimingMode::DepthAware`] where FIFOs that map to
//! BRAM pay 2. A run deadlocks when every unfinished task is blocked and no
//! pending token or slot release can unblock any of them; the reported
//! latency is then the stall cycle.

use alloc::vec::Vec;

use thiserror::Error;

use crate::memory;
use crate::trace::{FifoConfig, FifoId, TaskId, TraceProgram};

mod deadlock;
pub mod engine;
pub mod reference;

pub use deadlock::{detect_deadlock_cycle, WaitFor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum TimingMode {
    /// Every FIFO has a read latency of one cycle.
    #[default]
    Uniform,
    /// BRAM-backed FIFOs have one extra cycle of read latency.
    DepthAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockReason {
    /// Waiting to write into a full FIFO.
    Full,
    /// Waiting to read from an empty FIFO.
    Empty,
}

/// A task stuck on a channel when the run stalled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockedTask {
    pub task: TaskId,
    pub fifo: FifoId,
    pub reason: BlockReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadlockInfo {
    pub cycle: u64,
    /// Blocked tasks in ascending task order.
    pub blocked: Vec<BlockedTask>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    /// Completion cycle, or the stall cycle when deadlocked.
    pub latency: u64,
    pub deadlocked: bool,
    pub deadlock: Option<DeadlockInfo>,
    pub peak_occupancy: Vec<u32>,
    /// Cycles spent blocked on each FIFO, producer and consumer combined.
    pub stall_cycles: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{got} depths given for a program with {expected} fifos")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fifo {fifo} has depth 0")]
    ZeroDepth { fifo: FifoId },
    #[error("simulation did not deadlock")]
    NotDeadlocked,
}

/// Replays `program` with the depths of `config`.
pub fn simulate(
    program: &TraceProgram,
    config: &FifoConfig,
    mode: TimingMode,
) -> Result<SimResult, SimError> {
    engine::run(program, config.depths(), mode)
}

/// Like [`simulate`] but accepts any depth of at least 1.
pub fn simulate_depths(
    program: &TraceProgram,
    depths: &[u32],
    mode: TimingMode,
) -> Result<SimResult, SimError> {
    engine::run(program, depths, mode)
}

pub(crate) fn check_depths(program: &TraceProgram, depths: &[u32]) -> Result<(), SimError> {
    if depths.len() != program.fifo_count() {
        return Err(SimError::LengthMismatch {
            expected: program.fifo_count(),
            got: depths.len(),
        });
    }
    if let Some(fifo) = depths.iter().position(|&d| d == 0) {
        return Err(SimError::ZeroDepth { fifo });
    }
    Ok(())
}

/// Cycles between a write and the first cycle its token may be read.
pub fn read_latencies(program: &TraceProgram, depths: &[u32], mode: TimingMode) -> Vec<u64> {
    program
        .fifos()
        .iter()
        .zip(depths)
        .map(|(fifo, &d)| match mode {
            TimingMode::Uniform => 1,
            TimingMode::DepthAware if memory::is_shift_register(d, fifo.width) => 1,
            TimingMode::DepthAware => 2,
        })
        .collect()
}

/// Runs batches of configurations against one program.
///
/// Implementations may evaluate concurrently but must return results in
/// input order, each identical to a standalone [`simulate`] call.
pub trait Evaluator {
    fn evaluate_many(
        &self,
        program: &TraceProgram,
        configs: &[FifoConfig],
        mode: TimingMode,
    ) -> Result<Vec<SimResult>, SimError>;
}

/// Evaluates one configuration after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Evaluator for Sequential {
    fn evaluate_many(
        &self,
        program: &TraceProgram,
        configs: &[FifoConfig],
        mode: TimingMode,
    ) -> Result<Vec<SimResult>, SimError> {
        configs.iter().map(|c| simulate(program, c, mode)).collect()
    }
}

pub fn evaluate_many(
    program: &TraceProgram,
    configs: &[FifoConfig],
    mode: TimingMode,
) -> Result<Vec<SimResult>, SimError> {
    Sequential.evaluate_many(program, configs, mode)
}
