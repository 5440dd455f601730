// SPDX-License-Identifier: Apache-2.0

//! Simulated annealing over a β sweep of scalarized objectives.
//!
//! Chain `j` of `N` minimizes `(1 - β_j) * latency + β_j * bram` with
//! `β_j = j / (N - 1)`, both terms divided by the Baseline-Max values unless
//! raw scalarization is requested. All chains start at the top of the space
//! and advance in lockstep so each step is one evaluation batch.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::space::SearchSpace;
use super::{baseline_max, EvaluatedPoint, OptimizeError, SearchBudget, Session};

struct Chain {
    beta: f64,
    rng: ChaCha8Rng,
    state: Vec<usize>,
    energy: f64,
}

struct Objective {
    latency_scale: f64,
    bram_scale: f64,
}

impl Objective {
    fn energy(&self, beta: f64, point: &EvaluatedPoint) -> f64 {
        match point.latency {
            None => f64::INFINITY,
            Some(lat) => {
                (1.0 - beta) * lat as f64 / self.latency_scale + beta * point.bram as f64 / self.bram_scale
            }
        }
    }
}

pub(crate) fn betas(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.5],
        _ => (0..n).map(|j| j as f64 / (n - 1) as f64).collect(),
    }
}

fn neighbour(space: &SearchSpace, movable: &[usize], state: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut next = state.to_vec();
    let dim = movable[rng.gen_range(0..movable.len())];
    let last = space.dims[dim].candidates.len() - 1;
    let i = next[dim];
    next[dim] = if i == 0 {
        1
    } else if i == last {
        last - 1
    } else if rng.gen_bool(0.5) {
        i + 1
    } else {
        i - 1
    };
    next
}

pub(crate) fn run(session: &mut Session<'_>, space: &SearchSpace, budget: &SearchBudget) -> Result<(), OptimizeError> {
    if budget.beta_count == 0 || budget.beta_count > budget.max_evaluations {
        return Err(OptimizeError::InvalidBudget("beta count must be in [1, max_evaluations]"));
    }
    run_with_betas(session, space, budget, &betas(budget.beta_count))
}

pub(crate) fn run_with_betas(
    session: &mut Session<'_>,
    space: &SearchSpace,
    budget: &SearchBudget,
    betas: &[f64],
) -> Result<(), OptimizeError> {
    let baseline = baseline_max(session.program());
    let (base, _) = session.evaluate_one(baseline.clone())?;

    let start = space.top();
    let start_config = space.config(&start);
    let start_point = if start_config == baseline || session.remaining() == 0 {
        base.clone()
    } else {
        session.evaluate_one(start_config)?.0
    };

    let movable = space.movable();
    if movable.is_empty() {
        return Ok(());
    }

    let objective = if budget.raw_scalarization {
        Objective {
            latency_scale: 1.0,
            bram_scale: 1.0,
        }
    } else {
        Objective {
            latency_scale: base.latency.unwrap_or(1).max(1) as f64,
            bram_scale: base.bram.max(1) as f64,
        }
    };

    let mut chains: Vec<Chain> = betas
        .iter()
        .copied()
        .enumerate()
        .map(|(j, beta)| {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            rng.set_stream(j as u64 + 1);
            Chain {
                beta,
                rng,
                state: start.clone(),
                energy: objective.energy(beta, &start_point),
            }
        })
        .collect();

    let steps = session.remaining() / chains.len();
    let schedule = budget.schedule;
    for step in 0..steps {
        let proposals: Vec<Vec<usize>> = chains
            .iter_mut()
            .map(|c| neighbour(space, &movable, &c.state, &mut c.rng))
            .collect();
        let configs = proposals.iter().map(|s| space.config(s)).collect();
        let evaluated = session.evaluate(configs)?;
        let exponent = (step / schedule.steps_per_temperature.max(1)) as f64;
        let temperature = schedule.initial_temperature * libm::pow(schedule.cooling, exponent);
        for ((chain, proposal), (point, _)) in chains.iter_mut().zip(proposals).zip(evaluated) {
            let energy = objective.energy(chain.beta, &point);
            let draw: f64 = chain.rng.gen();
            let accept = if energy.is_infinite() {
                false
            } else if chain.energy.is_infinite() || energy <= chain.energy {
                true
            } else if temperature > 0.0 {
                draw < libm::exp(-(energy - chain.energy) / temperature)
            } else {
                false
            };
            if accept {
                chain.state = proposal;
                chain.energy = energy;
            }
        }
    }
    Ok(())
}
