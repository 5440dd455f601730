// SPDX-License-Identifier: Apache-2.0

use fifo_advisor_core::sim::{Evaluator, SimError};
use fifo_advisor_core::{simulate, FifoConfig, SimResult, TimingMode, TraceProgram};
use rayon::prelude::*;

/// Simulates a batch on a private rayon pool. Results come back in input
/// order and do not depend on the worker count.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `jobs = 0` picks the available parallelism.
    pub fn new(jobs: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .thread_name(|i| format!("fifo-eval-{i}"))
            .build()?;
        Ok(Self { pool })
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Evaluator for Parallel {
    fn evaluate_many(
        &self,
        program: &TraceProgram,
        configs: &[FifoConfig],
        mode: TimingMode,
    ) -> Result<Vec<SimResult>, SimError> {
        self.pool
            .install(|| configs.par_iter().map(|c| simulate(program, c, mode)).collect())
    }
}
