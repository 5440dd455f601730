// SPDX-License-Identifier: Apache-2.0

//! Uniform sampling over breakpoint indices.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::space::SearchSpace;
use super::{baseline_max, OptimizeError, SearchBudget, Session};

const BATCH: usize = 256;

pub(crate) fn run(session: &mut Session<'_>, space: &SearchSpace, budget: &SearchBudget) -> Result<(), OptimizeError> {
    let baseline = baseline_max(session.program());
    session.evaluate_one(baseline.clone())?;

    if space.movable().is_empty() {
        let only = space.config(&space.top());
        if only != baseline && session.remaining() > 0 {
            session.evaluate_one(only)?;
        }
        return Ok(());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    while session.remaining() > 0 {
        let n = session.remaining().min(BATCH);
        let batch: Vec<_> = (0..n).map(|_| space.config(&space.sample(&mut rng))).collect();
        session.evaluate(batch)?;
    }
    Ok(())
}
