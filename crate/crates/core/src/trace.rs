// SPDX-License-Identifier: Apache-2.0

//! Trace data model: FIFO declarations, per-task event lists and the
//! validated, immutable [`TraceProgram`] that every evaluation replays.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::sim::{self, TimingMode};

pub type FifoId = usize;
pub type TaskId = usize;

/// Smallest depth a FIFO may be configured with.
pub const MIN_DEPTH: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FifoDecl {
    pub id: FifoId,
    pub name: String,
    /// Bits per token.
    pub width: u32,
    pub group: Option<String>,
    /// Depth fixed by the design, used as the search upper bound.
    pub declared_depth: Option<u32>,
    producer: Option<TaskId>,
    consumer: Option<TaskId>,
}

impl FifoDecl {
    pub fn new(id: FifoId, name: impl Into<String>, width: u32) -> Self {
        Self {
            id,
            name: name.into(),
            width,
            group: None,
            declared_depth: None,
            producer: None,
            consumer: None,
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.declared_depth = Some(depth);
        self
    }

    /// Task that writes this FIFO, if any write exists in the trace.
    pub fn producer(&self) -> Option<TaskId> {
        self.producer
    }

    /// Task that reads this FIFO, if any read exists in the trace.
    pub fn consumer(&self) -> Option<TaskId> {
        self.consumer
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Compute(u64),
    Read(FifoId),
    Write(FifoId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskTrace {
    pub id: TaskId,
    pub name: String,
    pub events: Vec<Event>,
}

impl TaskTrace {
    pub fn new(id: TaskId, name: impl Into<String>, events: Vec<Event>) -> Self {
        Self {
            id,
            name: name.into(),
            events,
        }
    }
}

/// One structural problem found while validating a program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceIssue {
    #[error("fifo at position {position} has id {id}; fifo ids must be dense from 0")]
    FifoIdNotDense { position: usize, id: FifoId },
    #[error("task at position {position} has id {id}; task ids must be dense from 0")]
    TaskIdNotDense { position: usize, id: TaskId },
    #[error("fifo name `{name}` is declared more than once")]
    DuplicateFifoName { name: String },
    #[error("fifo `{fifo}` has width 0")]
    ZeroWidth { fifo: String },
    #[error("fifo `{fifo}` declares depth {depth}, below the minimum of 2")]
    DeclaredDepthTooSmall { fifo: String, depth: u32 },
    #[error("task `{task}` references unknown fifo id {fifo}")]
    UnknownFifo { task: String, fifo: FifoId },
    #[error("fifo `{fifo}` is written by more than one task")]
    MultipleProducers { fifo: String },
    #[error("fifo `{fifo}` is read by more than one task")]
    MultipleConsumers { fifo: String },
    #[error("fifo `{fifo}` is both written and read by task `{task}`")]
    SelfLoop { fifo: String, task: String },
    #[error("fifo `{fifo}`: reads exceed writes ({reads} reads, {writes} writes)")]
    ReadsExceedWrites {
        fifo: String,
        reads: u64,
        writes: u64,
    },
    #[error("program deadlocks even with every fifo at its upper bound (stall at cycle {cycle})")]
    DeadlocksAtUpperBounds { cycle: u64 },
}

/// All issues found in a rejected program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub issues: Vec<TraceIssue>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid trace program")?;
        for issue in &self.issues {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ValidationError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OpKind {
    Read,
    Write,
}

/// A channel operation with the compute delay that precedes it folded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Op {
    pub delay: u64,
    pub kind: OpKind,
    pub fifo: u32,
}

/// Preprocessed form of one task, shared by every simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TaskPlan {
    pub ops: Vec<Op>,
    /// Compute cycles after the last channel operation.
    pub tail: u64,
}

/// A validated dataflow trace. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceProgram {
    name: String,
    fifos: Vec<FifoDecl>,
    tasks: Vec<TaskTrace>,
    write_counts: Vec<u64>,
    read_counts: Vec<u64>,
    plans: Vec<TaskPlan>,
}

impl TraceProgram {
    /// Validates and preprocesses a program.
    ///
    /// Producer and consumer tasks of each FIFO are derived from the events;
    /// any values already set on the declarations are overwritten.
    pub fn new(
        name: impl Into<String>,
        mut fifos: Vec<FifoDecl>,
        tasks: Vec<TaskTrace>,
    ) -> Result<Self, ValidationError> {
        let mut issues = Vec::new();

        for (position, fifo) in fifos.iter().enumerate() {
            if fifo.id != position {
                issues.push(TraceIssue::FifoIdNotDense {
                    position,
                    id: fifo.id,
                });
            }
            if fifo.width == 0 {
                issues.push(TraceIssue::ZeroWidth {
                    fifo: fifo.name.clone(),
                });
            }
            if let Some(depth) = fifo.declared_depth {
                if depth < MIN_DEPTH {
                    issues.push(TraceIssue::DeclaredDepthTooSmall {
                        fifo: fifo.name.clone(),
                        depth,
                    });
                }
            }
        }
        let mut names = BTreeMap::new();
        for fifo in &fifos {
            if names.insert(fifo.name.as_str(), fifo.id).is_some() {
                issues.push(TraceIssue::DuplicateFifoName {
                    name: fifo.name.clone(),
                });
            }
        }
        for (position, task) in tasks.iter().enumerate() {
            if task.id != position {
                issues.push(TraceIssue::TaskIdNotDense {
                    position,
                    id: task.id,
                });
            }
        }
        if !issues.is_empty() {
            return Err(ValidationError { issues });
        }

        let n = fifos.len();
        let mut write_counts = vec![0u64; n];
        let mut read_counts = vec![0u64; n];
        let mut producers: Vec<Option<TaskId>> = vec![None; n];
        let mut consumers: Vec<Option<TaskId>> = vec![None; n];
        let mut multi_producer = vec![false; n];
        let mut multi_consumer = vec![false; n];

        for task in &tasks {
            for event in &task.events {
                let (fifo, is_write) = match *event {
                    Event::Compute(_) => continue,
                    Event::Read(f) => (f, false),
                    Event::Write(f) => (f, true),
                };
                if fifo >= n {
                    let issue = TraceIssue::UnknownFifo {
                        task: task.name.clone(),
                        fifo,
                    };
                    if !issues.contains(&issue) {
                        issues.push(issue);
                    }
                    continue;
                }
                let (owner, counts, multi) = if is_write {
                    (&mut producers, &mut write_counts, &mut multi_producer)
                } else {
                    (&mut consumers, &mut read_counts, &mut multi_consumer)
                };
                counts[fifo] += 1;
                match owner[fifo] {
                    None => owner[fifo] = Some(task.id),
                    Some(t) if t != task.id => multi[fifo] = true,
                    Some(_) => {}
                }
            }
        }

        for (i, fifo) in fifos.iter_mut().enumerate() {
            if multi_producer[i] {
                issues.push(TraceIssue::MultipleProducers {
                    fifo: fifo.name.clone(),
                });
            }
            if multi_consumer[i] {
                issues.push(TraceIssue::MultipleConsumers {
                    fifo: fifo.name.clone(),
                });
            }
            if let (Some(p), Some(c)) = (producers[i], consumers[i]) {
                if p == c && !multi_producer[i] && !multi_consumer[i] {
                    issues.push(TraceIssue::SelfLoop {
                        fifo: fifo.name.clone(),
                        task: tasks[p].name.clone(),
                    });
                }
            }
            if read_counts[i] > write_counts[i] {
                issues.push(TraceIssue::ReadsExceedWrites {
                    fifo: fifo.name.clone(),
                    reads: read_counts[i],
                    writes: write_counts[i],
                });
            }
            fifo.producer = producers[i];
            fifo.consumer = consumers[i];
        }
        if !issues.is_empty() {
            return Err(ValidationError { issues });
        }

        let plans = tasks.iter().map(compile_task).collect();
        let program = Self {
            name: name.into(),
            fifos,
            tasks,
            write_counts,
            read_counts,
            plans,
        };

        // A program that stalls with every FIFO at its bound stalls under
        // every configuration, by capacity monotonicity.
        let result = sim::simulate_depths(&program, &program.upper_bounds(), TimingMode::Uniform)
            .expect("bounds match fifo count");
        if result.deadlocked {
            return Err(ValidationError {
                issues: vec![TraceIssue::DeadlocksAtUpperBounds {
                    cycle: result.latency,
                }],
            });
        }
        Ok(program)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fifos(&self) -> &[FifoDecl] {
        &self.fifos
    }

    pub fn tasks(&self) -> &[TaskTrace] {
        &self.tasks
    }

    pub fn fifo_count(&self) -> usize {
        self.fifos.len()
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn fifo_by_name(&self, name: &str) -> Option<&FifoDecl> {
        self.fifos.iter().find(|f| f.name == name)
    }

    pub fn write_count(&self, fifo: FifoId) -> u64 {
        self.write_counts[fifo]
    }

    pub fn read_count(&self, fifo: FifoId) -> u64 {
        self.read_counts[fifo]
    }

    /// Total number of events across all tasks.
    pub fn event_count(&self) -> usize {
        self.tasks.iter().map(|t| t.events.len()).sum()
    }

    /// Largest depth worth considering for `fifo`: the declared depth, else
    /// the number of writes (every token buffered), never below 2.
    pub fn upper_bound(&self, fifo: FifoId) -> u32 {
        let decl = &self.fifos[fifo];
        match decl.declared_depth {
            Some(d) => d.max(MIN_DEPTH),
            None => {
                let writes = u32::try_from(self.write_counts[fifo]).unwrap_or(u32::MAX);
                writes.max(MIN_DEPTH)
            }
        }
    }

    pub fn upper_bounds(&self) -> Vec<u32> {
        (0..self.fifos.len()).map(|i| self.upper_bound(i)).collect()
    }

    /// Partition of FIFO ids by group label. Each labelled group forms one
    /// cell, ordered by its smallest member; ungrouped FIFOs are singletons.
    pub fn fifo_groups(&self) -> Vec<Vec<FifoId>> {
        let mut cells: Vec<Vec<FifoId>> = Vec::new();
        let mut by_label: BTreeMap<&str, usize> = BTreeMap::new();
        for fifo in &self.fifos {
            match &fifo.group {
                Some(label) => match by_label.get(label.as_str()) {
                    Some(&cell) => cells[cell].push(fifo.id),
                    None => {
                        by_label.insert(label.as_str(), cells.len());
                        cells.push(vec![fifo.id]);
                    }
                },
                None => cells.push(vec![fifo.id]),
            }
        }
        cells
    }

    pub(crate) fn plans(&self) -> &[TaskPlan] {
        &self.plans
    }
}

fn compile_task(task: &TaskTrace) -> TaskPlan {
    let mut ops = Vec::new();
    let mut pending = 0u64;
    for event in &task.events {
        match *event {
            Event::Compute(k) => pending += k,
            Event::Read(f) => {
                ops.push(Op {
                    delay: pending,
                    kind: OpKind::Read,
                    fifo: f as u32,
                });
                pending = 0;
            }
            Event::Write(f) => {
                ops.push(Op {
                    delay: pending,
                    kind: OpKind::Write,
                    fifo: f as u32,
                });
                pending = 0;
            }
        }
    }
    TaskPlan { ops, tail: pending }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("configuration has {got} depths but the program has {expected} fifos")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fifo `{fifo}` depth {depth} is outside [2, {upper}]")]
    OutOfBounds { fifo: String, depth: u32, upper: u32 },
}

/// One depth per FIFO, each within `[2, upper_bound]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FifoConfig {
    depths: Vec<u32>,
}

impl FifoConfig {
    pub fn new(program: &TraceProgram, depths: Vec<u32>) -> Result<Self, ConfigError> {
        if depths.len() != program.fifo_count() {
            return Err(ConfigError::LengthMismatch {
                expected: program.fifo_count(),
                got: depths.len(),
            });
        }
        for (i, &depth) in depths.iter().enumerate() {
            let upper = program.upper_bound(i);
            if depth < MIN_DEPTH || depth > upper {
                return Err(ConfigError::OutOfBounds {
                    fifo: program.fifos()[i].name.clone(),
                    depth,
                    upper,
                });
            }
        }
        Ok(Self { depths })
    }

    /// Wraps depths already known to satisfy the bounds.
    pub(crate) fn from_trusted(depths: Vec<u32>) -> Self {
        Self { depths }
    }

    pub fn depths(&self) -> &[u32] {
        &self.depths
    }

    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }

    pub fn into_depths(self) -> Vec<u32> {
        self.depths
    }
}
