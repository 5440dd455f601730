// SPDX-License-Identifier: Apache-2.0

//! Dual-objective search over FIFO depths.
//!
//! Every optimizer minimizes `(latency, BRAM count)` subject to the run not
//! deadlocking, restricted to each FIFO's breakpoint depths. All of them
//! evaluate Baseline-Max first and return the Pareto frontier of everything
//! they evaluated.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::memory;
use crate::sim::{Evaluator, SimError, SimResult, TimingMode};
use crate::trace::{FifoConfig, TraceProgram, MIN_DEPTH};

mod anneal;
mod greedy;
pub mod pareto;
mod random;
pub mod score;
mod space;

pub use pareto::{hypervolume, pareto_filter, ParetoFrontier};
pub use score::{highlight, score, ScoreError};

/// Geometric cooling schedule for simulated annealing.
///
/// Temperatures are on the scale of the scalarized objective, which is a
/// ratio to Baseline-Max by default; one step typically moves it by a few
/// hundredths, hence the low starting temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    /// Factor applied to the temperature every `steps_per_temperature` steps.
    pub cooling: f64,
    pub steps_per_temperature: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            initial_temperature: 0.05,
            cooling: 0.9,
            steps_per_temperature: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Hard cap on simulations.
    pub max_evaluations: usize,
    pub seed: u64,
    /// Number of annealing chains, one per weight in the β sweep.
    pub beta_count: usize,
    /// Latency slack the greedy search tolerates over Baseline-Max.
    pub epsilon: f64,
    pub schedule: AnnealSchedule,
    /// Anneal on raw cycles and BRAM counts instead of ratios to
    /// Baseline-Max.
    pub raw_scalarization: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_evaluations: 1000,
            seed: 0,
            beta_count: 8,
            epsilon: 0.05,
            schedule: AnnealSchedule::default(),
            raw_scalarization: false,
        }
    }
}

impl SearchBudget {
    fn check(&self) -> Result<(), OptimizeError> {
        if self.max_evaluations == 0 {
            return Err(OptimizeError::InvalidBudget("max_evaluations must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(OptimizeError::InvalidBudget("epsilon must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid search budget: {0}")]
    InvalidBudget(&'static str),
}

/// A configuration with its two objective values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluatedPoint {
    pub config: FifoConfig,
    /// `None` when the run deadlocked.
    pub latency: Option<u64>,
    pub bram: u64,
}

impl EvaluatedPoint {
    pub fn new(program: &TraceProgram, config: FifoConfig, result: &SimResult) -> Self {
        let bram = memory::config_bram_count(program, config.depths());
        Self {
            config,
            latency: (!result.deadlocked).then_some(result.latency),
            bram,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.latency.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub frontier: ParetoFrontier,
    /// Every evaluation in the order it was made.
    pub evaluations: Vec<EvaluatedPoint>,
    /// Configuration the search settled on, for searches that have one
    /// (greedy).
    pub final_point: Option<EvaluatedPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Optimizer {
    Random,
    GroupedRandom,
    SimulatedAnnealing,
    GroupedSimulatedAnnealing,
    Greedy,
}

impl Optimizer {
    pub const ALL: [Optimizer; 5] = [
        Optimizer::Random,
        Optimizer::GroupedRandom,
        Optimizer::SimulatedAnnealing,
        Optimizer::GroupedSimulatedAnnealing,
        Optimizer::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Random => "random",
            Optimizer::GroupedRandom => "grouped-random",
            Optimizer::SimulatedAnnealing => "sa",
            Optimizer::GroupedSimulatedAnnealing => "grouped-sa",
            Optimizer::Greedy => "greedy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }

    pub fn run(
        self,
        program: &TraceProgram,
        budget: &SearchBudget,
        mode: TimingMode,
        evaluator: &dyn Evaluator,
    ) -> Result<SearchOutcome, OptimizeError> {
        budget.check()?;
        let mut session = Session::new(program, mode, evaluator, budget.max_evaluations);
        let final_point = match self {
            Optimizer::Random => {
                random::run(&mut session, &space::SearchSpace::per_fifo(program), budget)?;
                None
            }
            Optimizer::GroupedRandom => {
                random::run(&mut session, &space::SearchSpace::grouped(program), budget)?;
                None
            }
            Optimizer::SimulatedAnnealing => {
                anneal::run(&mut session, &space::SearchSpace::per_fifo(program), budget)?;
                None
            }
            Optimizer::GroupedSimulatedAnnealing => {
                anneal::run(&mut session, &space::SearchSpace::grouped(program), budget)?;
                None
            }
            Optimizer::Greedy => greedy::run(&mut session, budget)?,
        };
        Ok(session.finish(final_point))
    }
}

pub fn random_search(
    program: &TraceProgram,
    budget: &SearchBudget,
    mode: TimingMode,
    evaluator: &dyn Evaluator,
) -> Result<SearchOutcome, OptimizeError> {
    Optimizer::Random.run(program, budget, mode, evaluator)
}

pub fn grouped_random_search(
    program: &TraceProgram,
    budget: &SearchBudget,
    mode: TimingMode,
    evaluator: &dyn Evaluator,
) -> Result<SearchOutcome, OptimizeError> {
    Optimizer::GroupedRandom.run(program, budget, mode, evaluator)
}

pub fn simulated_annealing(
    program: &TraceProgram,
    budget: &SearchBudget,
    mode: TimingMode,
    evaluator: &dyn Evaluator,
) -> Result<SearchOutcome, OptimizeError> {
    Optimizer::SimulatedAnnealing.run(program, budget, mode, evaluator)
}

pub fn grouped_simulated_annealing(
    program: &TraceProgram,
    budget: &SearchBudget,
    mode: TimingMode,
    evaluator: &dyn Evaluator,
) -> Result<SearchOutcome, OptimizeError> {
    Optimizer::GroupedSimulatedAnnealing.run(program, budget, mode, evaluator)
}

pub fn greedy_search(
    program: &TraceProgram,
    budget: &SearchBudget,
    mode: TimingMode,
    evaluator: &dyn Evaluator,
) -> Result<SearchOutcome, OptimizeError> {
    Optimizer::Greedy.run(program, budget, mode, evaluator)
}

/// Every FIFO at its upper bound.
pub fn baseline_max(program: &TraceProgram) -> FifoConfig {
    FifoConfig::from_trusted(program.upper_bounds())
}

/// Every FIFO at depth 2.
pub fn baseline_min(program: &TraceProgram) -> FifoConfig {
    FifoConfig::from_trusted(vec![MIN_DEPTH; program.fifo_count()])
}

/// Evaluation bookkeeping shared by the optimizers.
pub(crate) struct Session<'a> {
    program: &'a TraceProgram,
    mode: TimingMode,
    evaluator: &'a dyn Evaluator,
    remaining: usize,
    log: Vec<EvaluatedPoint>,
}

impl<'a> Session<'a> {
    fn new(
        program: &'a TraceProgram,
        mode: TimingMode,
        evaluator: &'a dyn Evaluator,
        budget: usize,
    ) -> Self {
        Self {
            program,
            mode,
            evaluator,
            remaining: budget,
            log: Vec::new(),
        }
    }

    pub fn program(&self) -> &'a TraceProgram {
        self.program
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Simulates `configs`, logging each. Panics if it would overrun the
    /// budget.
    pub fn evaluate(
        &mut self,
        configs: Vec<FifoConfig>,
    ) -> Result<Vec<(EvaluatedPoint, SimResult)>, OptimizeError> {
        assert!(configs.len() <= self.remaining, "evaluation budget overrun");
        if configs.is_empty() {
            return Ok(Vec::new());
        }
        let results = self
            .evaluator
            .evaluate_many(self.program, &configs, self.mode)?;
        self.remaining -= configs.len();
        let out: Vec<(EvaluatedPoint, SimResult)> = configs
            .into_iter()
            .zip(results)
            .map(|(c, r)| (EvaluatedPoint::new(self.program, c, &r), r))
            .collect();
        self.log.extend(out.iter().map(|(p, _)| p.clone()));
        Ok(out)
    }

    pub fn evaluate_one(
        &mut self,
        config: FifoConfig,
    ) -> Result<(EvaluatedPoint, SimResult), OptimizeError> {
        Ok(self.evaluate(vec![config])?.pop().expect("one result"))
    }

    fn finish(self, final_point: Option<EvaluatedPoint>) -> SearchOutcome {
        SearchOutcome {
            frontier: pareto_filter(&self.log),
            evaluations: self.log,
            final_point,
        }
    }
}
