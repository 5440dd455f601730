// SPDX-License-Identifier: Apache-2.0

//! JSON and CSV artifacts. Nothing here depends on timing, so reruns with
//! the same inputs produce byte-identical files.

use std::fmt::Write as _;

use fifo_advisor_core::optimize::{
    baseline_max, baseline_min, highlight, score, EvaluatedPoint, Optimizer, SearchOutcome,
};
use fifo_advisor_core::sim::{detect_deadlock_cycle, BlockReason, BlockedTask, SimError, WaitFor};
use fifo_advisor_core::{config_bram_count, fifo_bram_count, simulate, FifoConfig, SimResult, TimingMode, TraceProgram};
use serde::Serialize;

use crate::config::DepthMap;

pub fn mode_name(mode: TimingMode) -> &'static str {
    match mode {
        TimingMode::Uniform => "uniform",
        TimingMode::DepthAware => "depth-aware",
    }
}

fn reason_name(reason: BlockReason) -> &'static str {
    match reason {
        BlockReason::Full => "full",
        BlockReason::Empty => "empty",
    }
}

/// Infinite or undefined values become JSON `null`.
fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

/// Both reference configurations, simulated once.
#[derive(Debug, Clone)]
pub struct Baselines {
    pub max: EvaluatedPoint,
    pub min: EvaluatedPoint,
}

impl Baselines {
    pub fn evaluate(program: &TraceProgram, mode: TimingMode) -> Result<Self, SimError> {
        let point = |config: FifoConfig| -> Result<EvaluatedPoint, SimError> {
            let r = simulate(program, &config, mode)?;
            Ok(EvaluatedPoint::new(program, config, &r))
        };
        Ok(Self {
            max: point(baseline_max(program))?,
            min: point(baseline_min(program))?,
        })
    }
}

/// One optimizer's result.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub optimizer: Optimizer,
    pub outcome: SearchOutcome,
}

#[derive(Serialize)]
struct PointJson<'a> {
    depths: DepthMap<'a>,
    latency: Option<u64>,
    bram: u64,
    feasible: bool,
    score_vs_max: Option<f64>,
    score_vs_min: Option<f64>,
}

fn point_json<'a>(
    program: &'a TraceProgram,
    p: &'a EvaluatedPoint,
    baselines: &Baselines,
    alpha: f64,
) -> PointJson<'a> {
    PointJson {
        depths: DepthMap {
            program,
            depths: p.config.depths(),
        },
        latency: p.latency,
        bram: p.bram,
        feasible: p.is_feasible(),
        score_vs_max: finite(score(p, &baselines.max, alpha).ok()),
        score_vs_min: finite(score(p, &baselines.min, alpha).ok()),
    }
}

#[derive(Serialize)]
struct BaselinesJson<'a> {
    max: PointJson<'a>,
    min: PointJson<'a>,
}

#[derive(Serialize)]
struct FrontierJson<'a> {
    program: &'a str,
    optimizer: &'static str,
    mode: &'static str,
    alpha: f64,
    evaluations: usize,
    baselines: BaselinesJson<'a>,
    highlight: Option<PointJson<'a>>,
    #[serde(rename = "final")]
    final_point: Option<PointJson<'a>>,
    frontier: Vec<PointJson<'a>>,
}

/// The frontier of one run with scores against both baselines, the
/// α-highlighted point (chosen against Baseline-Max) and, for greedy, the
/// configuration it settled on.
pub fn frontier_json(
    program: &TraceProgram,
    mode: TimingMode,
    alpha: f64,
    baselines: &Baselines,
    run: &RunRecord,
) -> String {
    let out = &run.outcome;
    let doc = FrontierJson {
        program: program.name(),
        optimizer: run.optimizer.name(),
        mode: mode_name(mode),
        alpha,
        evaluations: out.evaluations.len(),
        baselines: BaselinesJson {
            max: point_json(program, &baselines.max, baselines, alpha),
            min: point_json(program, &baselines.min, baselines, alpha),
        },
        highlight: highlight(&out.frontier, &baselines.max, alpha)
            .ok()
            .map(|p| point_json(program, p, baselines, alpha)),
        final_point: out
            .final_point
            .as_ref()
            .map(|p| point_json(program, p, baselines, alpha)),
        frontier: out
            .frontier
            .points
            .iter()
            .map(|p| point_json(program, p, baselines, alpha))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// Every evaluation of every run, one row each, in evaluation order.
pub fn evaluation_log_csv(program: &TraceProgram, runs: &[RunRecord]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["optimizer", "index", "feasible", "latency", "bram"];
    header.extend(program.fifos().iter().map(|f| f.name.as_str()));
    w.write_record(&header)?;
    for run in runs {
        for (i, e) in run.outcome.evaluations.iter().enumerate() {
            let mut row = vec![
                run.optimizer.name().to_string(),
                i.to_string(),
                e.is_feasible().to_string(),
                e.latency.map(|l| l.to_string()).unwrap_or_default(),
                e.bram.to_string(),
            ];
            row.extend(e.config.depths().iter().map(u32::to_string));
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Headline numbers of one run's highlighted point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub optimizer: &'static str,
    pub evaluations: usize,
    pub frontier_size: usize,
    pub latency: Option<u64>,
    pub bram: Option<u64>,
    pub score: Option<f64>,
    /// Highlighted latency over Baseline-Max latency.
    pub latency_ratio_vs_max: Option<f64>,
    /// `1 - bram / Baseline-Max bram`; empty when the baseline uses none.
    pub bram_reduction_vs_max: Option<f64>,
    /// Empty when Baseline-Min deadlocks.
    pub latency_ratio_vs_min: Option<f64>,
    pub bram_reduction_vs_min: Option<f64>,
    /// Baseline-Min deadlocks but the highlighted point does not.
    pub un_deadlocked: bool,
}

fn ratio(value: u64, base: u64) -> Option<f64> {
    (base > 0).then(|| value as f64 / base as f64)
}

pub fn summarize(baselines: &Baselines, run: &RunRecord, alpha: f64) -> SummaryRow {
    let out = &run.outcome;
    let best = highlight(&out.frontier, &baselines.max, alpha).ok();
    let vs = |base: &EvaluatedPoint| -> (Option<f64>, Option<f64>) {
        match (best, base.latency) {
            (Some(p), Some(base_lat)) => (
                ratio(p.latency.unwrap(), base_lat),
                ratio(p.bram, base.bram).map(|r| 1.0 - r),
            ),
            _ => (None, None),
        }
    };
    let (latency_ratio_vs_max, bram_reduction_vs_max) = vs(&baselines.max);
    let (latency_ratio_vs_min, bram_reduction_vs_min) = vs(&baselines.min);
    SummaryRow {
        optimizer: run.optimizer.name(),
        evaluations: out.evaluations.len(),
        frontier_size: out.frontier.len(),
        latency: best.and_then(|p| p.latency),
        bram: best.map(|p| p.bram),
        score: finite(best.and_then(|p| score(p, &baselines.max, alpha).ok())),
        latency_ratio_vs_max,
        bram_reduction_vs_max,
        latency_ratio_vs_min,
        bram_reduction_vs_min,
        un_deadlocked: !baselines.min.is_feasible() && best.is_some(),
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Fixed-width table for humans.
pub fn summary_table(baselines: &Baselines, rows: &[SummaryRow]) -> String {
    let opt = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
    let pct = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{:.1}%", 100.0 * x));
    let mut s = String::new();
    writeln!(
        s,
        "baseline-max: latency {} bram {}; baseline-min: {}",
        opt(baselines.max.latency),
        baselines.max.bram,
        match baselines.min.latency {
            Some(l) => format!("latency {l} bram {}", baselines.min.bram),
            None => "deadlocks".to_string(),
        }
    )
    .unwrap();
    writeln!(
        s,
        "{:<15} {:>6} {:>9} {:>12} {:>8} {:>10} {:>10} {:>6}",
        "optimizer", "evals", "frontier", "latency", "bram", "lat/max", "bram cut", "fixed"
    )
    .unwrap();
    for r in rows {
        writeln!(
            s,
            "{:<15} {:>6} {:>9} {:>12} {:>8} {:>10} {:>10} {:>6}",
            r.optimizer,
            r.evaluations,
            r.frontier_size,
            opt(r.latency),
            opt(r.bram),
            r.latency_ratio_vs_max.map_or("-".to_string(), |x| format!("{x:.4}")),
            pct(r.bram_reduction_vs_max),
            if r.un_deadlocked { "yes" } else { "-" },
        )
        .unwrap();
    }
    s
}

#[derive(Serialize)]
struct BlockedJson<'a> {
    task: &'a str,
    fifo: &'a str,
    reason: &'static str,
}

#[derive(Serialize)]
struct DeadlockJson<'a> {
    cycle: u64,
    blocked: Vec<BlockedJson<'a>>,
    /// `cycle` when the blocked tasks wait on each other in a ring,
    /// `starvation` when one waits on a finished task.
    kind: &'static str,
    /// Human-readable wait-for chain, e.g.
    /// `producer -> x (full) -> consumer -> y (empty) -> producer`.
    chain: String,
}

#[derive(Serialize)]
struct FifoStatsJson<'a> {
    name: &'a str,
    depth: u32,
    bram: u32,
    peak_occupancy: u32,
    stall_cycles: u64,
}

#[derive(Serialize)]
struct SimulationJson<'a> {
    program: &'a str,
    mode: &'static str,
    depths: DepthMap<'a>,
    deadlocked: bool,
    latency: u64,
    bram: u64,
    deadlock: Option<DeadlockJson<'a>>,
    fifos: Vec<FifoStatsJson<'a>>,
}

fn blocked_json<'a>(program: &'a TraceProgram, b: &BlockedTask) -> BlockedJson<'a> {
    BlockedJson {
        task: &program.tasks()[b.task].name,
        fifo: &program.fifos()[b.fifo].name,
        reason: reason_name(b.reason),
    }
}

/// Renders a wait-for explanation as `task -> fifo (reason) -> task ...`.
pub fn wait_for_chain(program: &TraceProgram, wait: &WaitFor) -> String {
    let edge = |b: &BlockedTask| {
        format!(
            "{} -> {} ({})",
            program.tasks()[b.task].name,
            program.fifos()[b.fifo].name,
            reason_name(b.reason)
        )
    };
    match wait {
        WaitFor::Cycle(ring) => {
            let mut parts: Vec<String> = ring.iter().map(edge).collect();
            parts.push(program.tasks()[ring[0].task].name.clone());
            parts.join(" -> ")
        }
        WaitFor::Starvation(blocked) => blocked.iter().map(edge).collect::<Vec<_>>().join("; "),
    }
}

pub fn simulation_json(
    program: &TraceProgram,
    config: &FifoConfig,
    result: &SimResult,
    mode: TimingMode,
) -> String {
    let deadlock = result.deadlock.as_ref().map(|info| {
        let wait = detect_deadlock_cycle(result, program).expect("run deadlocked");
        DeadlockJson {
            cycle: info.cycle,
            blocked: info.blocked.iter().map(|b| blocked_json(program, b)).collect(),
            kind: match wait {
                WaitFor::Cycle(_) => "cycle",
                WaitFor::Starvation(_) => "starvation",
            },
            chain: wait_for_chain(program, &wait),
        }
    });
    let fifos = program
        .fifos()
        .iter()
        .zip(config.depths())
        .map(|(f, &depth)| FifoStatsJson {
            name: &f.name,
            depth,
            bram: fifo_bram_count(depth, f.width),
            peak_occupancy: result.peak_occupancy[f.id],
            stall_cycles: result.stall_cycles[f.id],
        })
        .collect();
    let doc = SimulationJson {
        program: program.name(),
        mode: mode_name(mode),
        depths: DepthMap {
            program,
            depths: config.depths(),
        },
        deadlocked: result.deadlocked,
        latency: result.latency,
        bram: config_bram_count(program, config.depths()),
        deadlock,
        fifos,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
