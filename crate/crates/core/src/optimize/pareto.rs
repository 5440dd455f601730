// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use super::EvaluatedPoint;

/// Feasible, mutually non-dominated points sorted by latency ascending
/// (and so by BRAM descending).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParetoFrontier {
    pub points: Vec<EvaluatedPoint>,
}

impl ParetoFrontier {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Checks feasibility, mutual non-dominance and ordering.
    pub fn is_valid(&self) -> bool {
        let feasible = self.points.iter().all(EvaluatedPoint::is_feasible);
        let ordered = self.points.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            a.latency < b.latency && a.bram > b.bram
        });
        feasible && ordered
    }

    /// Dominated area between the frontier and `reference`, as
    /// `(latency, bram)`. Points not strictly better than the reference in
    /// both objectives contribute nothing.
    pub fn hypervolume(&self, reference: (u64, u64)) -> u128 {
        hypervolume(&self.points, reference)
    }
}

fn objectives(p: &EvaluatedPoint) -> Option<(u64, u64)> {
    p.latency.map(|l| (l, p.bram))
}

/// Non-dominated feasible subset of `points`. Of several points with equal
/// objectives the first one encountered is kept.
pub fn pareto_filter(points: &[EvaluatedPoint]) -> ParetoFrontier {
    let mut order: Vec<(u64, u64, usize)> = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| objectives(p).map(|(l, b)| (l, b, i)))
        .collect();
    order.sort_unstable();
    let mut frontier = Vec::new();
    let mut best_bram = u64::MAX;
    for (_, bram, i) in order {
        if bram < best_bram {
            best_bram = bram;
            frontier.push(points[i].clone());
        }
    }
    ParetoFrontier { points: frontier }
}

/// Area dominated by the feasible points of `points` and bounded by
/// `reference`.
pub fn hypervolume(points: &[EvaluatedPoint], reference: (u64, u64)) -> u128 {
    let (ref_lat, ref_bram) = reference;
    let frontier = pareto_filter(points);
    let inside: Vec<(u64, u64)> = frontier
        .points
        .iter()
        .filter_map(objectives)
        .filter(|&(l, b)| l < ref_lat && b < ref_bram)
        .collect();
    let mut area = 0u128;
    for (i, &(lat, bram)) in inside.iter().enumerate() {
        let next_lat = inside.get(i + 1).map_or(ref_lat, |p| p.0);
        area += u128::from(next_lat - lat) * u128::from(ref_bram - bram);
    }
    area
}
