// SPDX-License-Identifier: Apache-2.0

//! Synthetic dataflow traces shaped like common streaming kernels.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::trace::{Event, FifoDecl, TaskTrace, TraceProgram, ValidationError};

/// Version of the corpus produced by [`suite`]. Bump whenever any entry
/// changes.
pub const SUITE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Linear pipeline; `fanout` parallel lanes per stage boundary.
    Chain,
    /// Reduction tree of `stages` levels with `fanout` children per node.
    Tree,
    /// A producer fills `x` then `y`; the consumer alternates `x`, `y`.
    WriteThenRead,
    /// `stages` tasks in a ring, each writing all of its tokens before reading.
    Ring,
    /// Random layered DAG with block-wise reads and writes.
    RandomDag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchSpec {
    pub pattern: Pattern,
    pub stages: usize,
    pub fanout: usize,
    pub tokens: usize,
    /// Bit-widths assigned round-robin to FIFOs (or to FIFO groups).
    pub widths: Vec<u32>,
    /// Inclusive range of compute cycles inserted around channel ops.
    pub compute_jitter: (u64, u64),
    /// Token count for [`Pattern::WriteThenRead`].
    pub n: usize,
    pub seed: u64,
    /// Stage-parallel FIFOs share a group label.
    pub grouping: bool,
}

impl BenchSpec {
    pub fn new(pattern: Pattern) -> Self {
        Self {
            pattern,
            stages: 3,
            fanout: 1,
            tokens: 16,
            widths: vec![32],
            compute_jitter: (0, 3),
            n: 8,
            seed: 0,
            grouping: false,
        }
    }

    pub fn write_then_read(n: usize) -> Self {
        Self {
            n,
            ..Self::new(Pattern::WriteThenRead)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("stages must be at least {min} for this pattern")]
    TooFewStages { min: usize },
    #[error("tokens must be at least 1")]
    NoTokens,
    #[error("n must be at least 1")]
    NoIterations,
    #[error("fanout must be at least 1")]
    NoFanout,
    #[error("widths must be non-empty and non-zero")]
    BadWidths,
    #[error("compute jitter range is reversed")]
    BadJitter,
    #[error("generated program is invalid: {0}")]
    Invalid(ValidationError),
}

struct Builder {
    fifos: Vec<FifoDecl>,
    tasks: Vec<Vec<Event>>,
    names: Vec<String>,
    rng: ChaCha8Rng,
    jitter: (u64, u64),
}

impl Builder {
    fn new(spec: &BenchSpec) -> Self {
        Self {
            fifos: Vec::new(),
            tasks: Vec::new(),
            names: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            jitter: spec.compute_jitter,
        }
    }

    fn task(&mut self, name: String) -> usize {
        self.tasks.push(Vec::new());
        self.names.push(name);
        self.tasks.len() - 1
    }

    fn fifo(&mut self, name: String, width: u32, group: Option<String>) -> usize {
        let id = self.fifos.len();
        let mut decl = FifoDecl::new(id, name, width);
        decl.group = group;
        self.fifos.push(decl);
        id
    }

    fn compute(&mut self, task: usize) {
        let (lo, hi) = self.jitter;
        let k = if hi > lo { self.rng.gen_range(lo..=hi) } else { lo };
        if k > 0 {
            self.tasks[task].push(Event::Compute(k));
        }
    }

    fn push(&mut self, task: usize, event: Event) {
        self.tasks[task].push(event);
    }

    fn finish(self, name: String) -> Result<TraceProgram, BenchError> {
        let tasks = self
            .tasks
            .into_iter()
            .zip(self.names)
            .enumerate()
            .map(|(id, (events, name))| TaskTrace::new(id, name, events))
            .collect();
        TraceProgram::new(name, self.fifos, tasks).map_err(BenchError::Invalid)
    }
}

fn check(spec: &BenchSpec) -> Result<(), BenchError> {
    let min_stages = match spec.pattern {
        Pattern::Chain | Pattern::RandomDag | Pattern::Ring => 2,
        Pattern::Tree | Pattern::WriteThenRead => 1,
    };
    if spec.pattern != Pattern::WriteThenRead && spec.stages < min_stages {
        return Err(BenchError::TooFewStages { min: min_stages });
    }
    if spec.tokens == 0 {
        return Err(BenchError::NoTokens);
    }
    if spec.pattern == Pattern::WriteThenRead && spec.n == 0 {
        return Err(BenchError::NoIterations);
    }
    if spec.fanout == 0 {
        return Err(BenchError::NoFanout);
    }
    if spec.widths.is_empty() || spec.widths.contains(&0) {
        return Err(BenchError::BadWidths);
    }
    if spec.compute_jitter.0 > spec.compute_jitter.1 {
        return Err(BenchError::BadJitter);
    }
    Ok(())
}

/// Builds the program described by `spec`. Deterministic in `spec`.
pub fn generate(spec: &BenchSpec) -> Result<TraceProgram, BenchError> {
    check(spec)?;
    match spec.pattern {
        Pattern::Chain => chain(spec),
        Pattern::Tree => tree(spec),
        Pattern::WriteThenRead => write_then_read(spec),
        Pattern::Ring => ring(spec),
        Pattern::RandomDag => random_dag(spec),
    }
}

fn width(spec: &BenchSpec, i: usize) -> u32 {
    spec.widths[i % spec.widths.len()]
}

fn chain(spec: &BenchSpec) -> Result<TraceProgram, BenchError> {
    let mut b = Builder::new(spec);
    let lanes = spec.fanout;
    let tasks: Vec<usize> = (0..spec.stages).map(|s| b.task(format!("stage{s}"))).collect();
    // links[s] are the lanes from stage s to stage s + 1.
    let links: Vec<Vec<usize>> = (0..spec.stages - 1)
        .map(|s| {
            let w = width(spec, s);
            (0..lanes)
                .map(|l| {
                    let name = if lanes == 1 { format!("s{s}") } else { format!("s{s}_{l}") };
                    let group = spec.grouping.then(|| format!("s{s}"));
                    b.fifo(name, w, group)
                })
                .collect()
        })
        .collect();
    for _ in 0..spec.tokens {
        for s in 0..spec.stages {
            let task = tasks[s];
            if s > 0 {
                for &f in &links[s - 1] {
                    b.push(task, Event::Read(f));
                }
            }
            b.compute(task);
            if s + 1 < spec.stages {
                for &f in &links[s] {
                    b.push(task, Event::Write(f));
                }
            }
        }
    }
    b.finish(format!("chain_s{}_l{}_t{}", spec.stages, lanes, spec.tokens))
}

fn tree(spec: &BenchSpec) -> Result<TraceProgram, BenchError> {
    let mut b = Builder::new(spec);
    // Level 0 is the root; level `stages` holds the leaves.
    let mut levels: Vec<Vec<usize>> = vec![vec![b.task(String::from("root"))]];
    // up[level][i] is the FIFO from node i of `level` to its parent.
    let mut up: Vec<Vec<usize>> = vec![Vec::new()];
    for level in 1..=spec.stages {
        let w = width(spec, level - 1);
        let parents = levels[level - 1].len();
        let mut nodes = Vec::new();
        let mut fifos = Vec::new();
        for i in 0..parents * spec.fanout {
            nodes.push(b.task(format!("n{level}_{i}")));
            let group = spec.grouping.then(|| format!("level{level}"));
            fifos.push(b.fifo(format!("l{level}_{i}"), w, group));
        }
        levels.push(nodes);
        up.push(fifos);
    }
    for _ in 0..spec.tokens {
        for level in 0..=spec.stages {
            for i in 0..levels[level].len() {
                let task = levels[level][i];
                if level < spec.stages {
                    for c in 0..spec.fanout {
                        b.push(task, Event::Read(up[level + 1][i * spec.fanout + c]));
                    }
                }
                b.compute(task);
                if level > 0 {
                    b.push(task, Event::Write(up[level][i]));
                }
            }
        }
    }
    b.finish(format!("tree_d{}_f{}_t{}", spec.stages, spec.fanout, spec.tokens))
}

fn write_then_read(spec: &BenchSpec) -> Result<TraceProgram, BenchError> {
    let mut b = Builder::new(spec);
    let producer = b.task(String::from("producer"));
    let consumer = b.task(String::from("consumer"));
    let x = b.fifo(String::from("x"), width(spec, 0), None);
    let y = b.fifo(String::from("y"), width(spec, 0), None);
    for _ in 0..spec.n {
        b.push(producer, Event::Write(x));
    }
    for _ in 0..spec.n {
        b.push(producer, Event::Write(y));
    }
    for _ in 0..spec.n {
        b.push(consumer, Event::Read(x));
        b.push(consumer, Event::Read(y));
    }
    b.finish(format!("write_then_read_n{}", spec.n))
}

fn ring(spec: &BenchSpec) -> Result<TraceProgram, BenchError> {
    let mut b = Builder::new(spec);
    let tasks: Vec<usize> = (0..spec.stages).map(|s| b.task(format!("node{s}"))).collect();
    let links: Vec<usize> = (0..spec.stages)
        .map(|s| b.fifo(format!("r{s}"), width(spec, s), None))
        .collect();
    for s in 0..spec.stages {
        let incoming = links[(s + spec.stages - 1) % spec.stages];
        for _ in 0..spec.tokens {
            b.compute(tasks[s]);
            b.push(tasks[s], Event::Write(links[s]));
        }
        for _ in 0..spec.tokens {
            b.push(tasks[s], Event::Read(incoming));
            b.compute(tasks[s]);
        }
    }
    b.finish(format!("ring_s{}_t{}", spec.stages, spec.tokens))
}

/// Block sizes a DAG task may move tokens in. A task reads a whole block
/// from each input in turn, computes, then writes a block to each output.
const DAG_BLOCKS: [usize; 4] = [1, 4, 16, 64];

fn random_dag(spec: &BenchSpec) -> Result<TraceProgram, BenchError> {
    let mut b = Builder::new(spec);
    let n = spec.stages;
    let tasks: Vec<usize> = (0..n).map(|i| b.task(format!("t{i}"))).collect();
    let mut inputs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut outputs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let max_in = spec.fanout.max(1);
    for i in 1..n {
        let mut preds: Vec<usize> = (0..i).collect();
        preds.shuffle(&mut b.rng);
        let k = b.rng.gen_range(1..=max_in.min(i));
        // Keep one edge from the previous task so the graph stays connected.
        let mut chosen: Vec<usize> = preds.into_iter().filter(|&p| p != i - 1).take(k - 1).collect();
        chosen.push(i - 1);
        chosen.sort_unstable();
        for p in chosen {
            let f = b.fifo(format!("e{p}_{i}"), width(spec, b.fifos.len()), None);
            outputs[p].push(f);
            inputs[i].push(f);
        }
    }
    let blocks: Vec<usize> = (0..n)
        .map(|_| {
            let fitting: Vec<usize> = DAG_BLOCKS
                .iter()
                .copied()
                .filter(|&blk| spec.tokens % blk == 0)
                .collect();
            *fitting.choose(&mut b.rng).unwrap_or(&1)
        })
        .collect();
    for (i, &task) in tasks.iter().enumerate() {
        let block = blocks[i];
        for _ in 0..spec.tokens / block {
            for &f in &inputs[i] {
                for _ in 0..block {
                    b.push(task, Event::Read(f));
                }
            }
            for _ in 0..block {
                b.compute(task);
            }
            for &f in &outputs[i] {
                for _ in 0..block {
                    b.push(task, Event::Write(f));
                }
            }
        }
    }
    let name = format!("dag_n{}_f{}_t{}", n, b.fifos.len(), spec.tokens);
    b.finish(name)
}

/// A small random valid program for property tests.
///
/// Tries successive derived seeds until the program passes validation, so
/// every seed yields a program.
pub fn fuzz(seed: u64) -> TraceProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(p) = fuzz_attempt(&mut rng) {
            return p;
        }
    }
}

fn fuzz_attempt(rng: &mut ChaCha8Rng) -> Option<TraceProgram> {
    let n_tasks = rng.gen_range(1..=5usize);
    let n_fifos = if n_tasks < 2 { 0 } else { rng.gen_range(1..=6usize) };
    let mut ops: Vec<Vec<Event>> = vec![Vec::new(); n_tasks];
    let mut fifos = Vec::new();
    for f in 0..n_fifos {
        let p = rng.gen_range(0..n_tasks);
        let mut c = rng.gen_range(0..n_tasks - 1);
        if c >= p {
            c += 1;
        }
        let writes = rng.gen_range(0..=6usize);
        let reads = if rng.gen_bool(0.8) { writes } else { rng.gen_range(0..=writes) };
        ops[p].extend(core::iter::repeat(Event::Write(f)).take(writes));
        ops[c].extend(core::iter::repeat(Event::Read(f)).take(reads));
        let width = *[1u32, 8, 32, 64, 512].choose(rng).unwrap();
        let mut decl = FifoDecl::new(f, format!("f{f}"), width);
        if rng.gen_bool(0.1) {
            decl.declared_depth = Some(rng.gen_range(2..=8));
        }
        fifos.push(decl);
    }
    let tasks = ops
        .into_iter()
        .enumerate()
        .map(|(id, mut events)| {
            // Tokens are indistinguishable, so any interleaving is a valid trace.
            events.shuffle(rng);
            let mut with_compute = Vec::with_capacity(events.len() * 2);
            for e in events {
                if rng.gen_bool(0.4) {
                    with_compute.push(Event::Compute(rng.gen_range(0..4)));
                }
                with_compute.push(e);
            }
            if rng.gen_bool(0.3) {
                with_compute.push(Event::Compute(rng.gen_range(1..6)));
            }
            TaskTrace::new(id, format!("t{id}"), with_compute)
        })
        .collect();
    TraceProgram::new("fuzz", fifos, tasks).ok()
}

/// A named corpus entry.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub spec: BenchSpec,
}

/// Name of the suite entry with at least 100 FIFOs and 10^5 events.
pub const THROUGHPUT_BENCHMARK: &str = "chain_lanes_100";

/// The fixed benchmark corpus.
pub fn suite() -> Vec<SuiteEntry> {
    let spec = |pattern, f: &dyn Fn(&mut BenchSpec)| {
        let mut s = BenchSpec::new(pattern);
        f(&mut s);
        s
    };
    vec![
        SuiteEntry { name: "write_then_read_4", spec: BenchSpec::write_then_read(4) },
        SuiteEntry { name: "write_then_read_8", spec: BenchSpec::write_then_read(8) },
        SuiteEntry { name: "write_then_read_16", spec: BenchSpec::write_then_read(16) },
        SuiteEntry {
            name: "chain_4",
            spec: spec(Pattern::Chain, &|s| {
                s.stages = 4;
                s.tokens = 256;
                s.seed = 1;
            }),
        },
        SuiteEntry {
            name: "chain_lanes_8",
            spec: spec(Pattern::Chain, &|s| {
                s.stages = 8;
                s.fanout = 4;
                s.tokens = 2048;
                s.widths = vec![32, 16, 64];
                s.grouping = true;
                s.seed = 2;
            }),
        },
        SuiteEntry {
            name: "chain_wide_6",
            spec: spec(Pattern::Chain, &|s| {
                s.stages = 6;
                s.fanout = 2;
                s.tokens = 1024;
                s.widths = vec![18, 9, 36];
                s.compute_jitter = (1, 4);
                s.grouping = true;
                s.seed = 3;
            }),
        },
        SuiteEntry {
            name: "tree_2x2",
            spec: spec(Pattern::Tree, &|s| {
                s.stages = 2;
                s.fanout = 2;
                s.tokens = 512;
                s.grouping = true;
                s.seed = 4;
            }),
        },
        SuiteEntry {
            name: "tree_3x2",
            spec: spec(Pattern::Tree, &|s| {
                s.stages = 3;
                s.fanout = 2;
                s.tokens = 1024;
                s.widths = vec![32, 64];
                s.grouping = true;
                s.seed = 5;
            }),
        },
        SuiteEntry {
            name: "tree_2x4",
            spec: spec(Pattern::Tree, &|s| {
                s.stages = 2;
                s.fanout = 4;
                s.tokens = 256;
                s.widths = vec![16];
                s.grouping = true;
                s.seed = 6;
            }),
        },
        SuiteEntry {
            name: "ring_3",
            spec: spec(Pattern::Ring, &|s| {
                s.stages = 3;
                s.tokens = 64;
                s.seed = 7;
            }),
        },
        SuiteEntry {
            name: "ring_5",
            spec: spec(Pattern::Ring, &|s| {
                s.stages = 5;
                s.tokens = 48;
                s.widths = vec![32, 8];
                s.seed = 8;
            }),
        },
        SuiteEntry {
            name: "dag_12",
            spec: spec(Pattern::RandomDag, &|s| {
                s.stages = 8;
                s.fanout = 3;
                s.tokens = 256;
                s.seed = 9;
            }),
        },
        SuiteEntry {
            name: "dag_24",
            spec: spec(Pattern::RandomDag, &|s| {
                s.stages = 14;
                s.fanout = 3;
                s.tokens = 1024;
                s.widths = vec![32, 16];
                s.seed = 10;
            }),
        },
        SuiteEntry {
            name: THROUGHPUT_BENCHMARK,
            spec: spec(Pattern::Chain, &|s| {
                s.stages = 26;
                s.fanout = 4;
                s.tokens = 512;
                s.grouping = true;
                s.seed = 11;
            }),
        },
    ]
}
