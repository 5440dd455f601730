// SPDX-License-Identifier: Apache-2.0

//! Weighted ratio score used to pick one point off a frontier.

use thiserror::Error;

use super::{EvaluatedPoint, ParetoFrontier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("cannot score a deadlocked point")]
    InfeasiblePoint,
    #[error("baseline is deadlocked")]
    InfeasibleBaseline,
    #[error("frontier is empty")]
    EmptyFrontier,
    #[error("alpha must lie in [0, 1]")]
    AlphaOutOfRange,
}

/// `value / base`, with `0 / 0 = 0` and `x / 0 = inf` for `x > 0`.
fn ratio(value: u64, base: u64) -> f64 {
    match (value, base) {
        (0, 0) => 0.0,
        (_, 0) => f64::INFINITY,
        (v, b) => v as f64 / b as f64,
    }
}

/// `alpha * latency ratio + (1 - alpha) * BRAM ratio` against `baseline`.
pub fn score(point: &EvaluatedPoint, baseline: &EvaluatedPoint, alpha: f64) -> Result<f64, ScoreError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ScoreError::AlphaOutOfRange);
    }
    let base_latency = baseline.latency.ok_or(ScoreError::InfeasibleBaseline)?;
    let latency = point.latency.ok_or(ScoreError::InfeasiblePoint)?;
    let lat = ratio(latency, base_latency);
    let bram = ratio(point.bram, baseline.bram);
    // Keep 0 * inf out of the sum when a weight is zero.
    let weighted = |w: f64, r: f64| if w == 0.0 { 0.0 } else { w * r };
    Ok(weighted(alpha, lat) + weighted(1.0 - alpha, bram))
}

/// Frontier point with the lowest score; ties go to lower latency, then
/// lower BRAM.
pub fn highlight<'a>(
    frontier: &'a ParetoFrontier,
    baseline: &EvaluatedPoint,
    alpha: f64,
) -> Result<&'a EvaluatedPoint, ScoreError> {
    let mut best: Option<(f64, &EvaluatedPoint)> = None;
    for p in &frontier.points {
        let s = score(p, baseline, alpha)?;
        let better = match best {
            None => true,
            Some((bs, bp)) => s < bs || (s == bs && (p.latency, p.bram) < (bp.latency, bp.bram)),
        };
        if better {
            best = Some((s, p));
        }
    }
    best.map(|(_, p)| p).ok_or(ScoreError::EmptyFrontier)
}
