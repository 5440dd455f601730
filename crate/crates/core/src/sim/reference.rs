// SPDX-License-Identifier: Apache-2.0

//! Cycle-stepped replay: the normative semantics the event-driven engine is
//! checked against.
//!
//! Every cycle, each task whose clock has reached the current cycle tries
//! its pending operation against the FIFO state of that cycle. Cycles in
//! which nothing can change are skipped; when no future cycle can change
//! anything and tasks remain, the run has deadlocked.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_depths, read_latencies, BlockReason, BlockedTask, DeadlockInfo, SimError, SimResult, TimingMode};
use crate::trace::{Event, TraceProgram};

struct Channel {
    depth: usize,
    latency: u64,
    writes: Vec<u64>,
    reads: Vec<u64>,
    /// Reads whose slot has been released by the current cycle.
    released: usize,
    peak: usize,
}

impl Channel {
    fn occupancy(&self) -> usize {
        self.writes.len() - self.released
    }

    fn advance_to(&mut self, cycle: u64) {
        while self.released < self.reads.len() && self.reads[self.released] + 1 <= cycle {
            self.released += 1;
        }
    }

    fn can_write(&self) -> bool {
        self.occupancy() < self.depth
    }

    fn can_read(&self, cycle: u64) -> bool {
        self.writes
            .get(self.reads.len())
            .is_some_and(|&w| w + self.latency <= cycle)
    }

    /// Earliest cycle after `cycle` at which this channel's state changes
    /// on its own.
    fn next_change(&self, cycle: u64) -> Option<u64> {
        let release = self.reads.get(self.released).map(|&r| r + 1);
        let visible = self.writes.get(self.reads.len()).map(|&w| w + self.latency);
        [release, visible]
            .into_iter()
            .flatten()
            .filter(|&c| c > cycle)
            .min()
    }
}

struct Task<'a> {
    events: &'a [Event],
    pc: usize,
    ready: u64,
    /// Cycle at which the pending channel op became ready.
    waiting_since: u64,
}

impl Task<'_> {
    /// Consumes compute events up to the next channel op.
    fn settle(&mut self) {
        while let Some(Event::Compute(k)) = self.events.get(self.pc) {
            self.ready += k;
            self.pc += 1;
        }
        self.waiting_since = self.ready;
    }

    fn done(&self) -> bool {
        self.pc >= self.events.len()
    }
}

pub fn run(program: &TraceProgram, depths: &[u32], mode: TimingMode) -> Result<SimResult, SimError> {
    check_depths(program, depths)?;
    let latencies = read_latencies(program, depths, mode);
    let mut channels: Vec<Channel> = depths
        .iter()
        .zip(&latencies)
        .map(|(&d, &l)| Channel {
            depth: d as usize,
            latency: l,
            writes: Vec::new(),
            reads: Vec::new(),
            released: 0,
            peak: 0,
        })
        .collect();
    let mut stall = vec![0u64; channels.len()];
    let mut tasks: Vec<Task> = program
        .tasks()
        .iter()
        .map(|t| {
            let mut task = Task {
                events: &t.events,
                pc: 0,
                ready: 0,
                waiting_since: 0,
            };
            task.settle();
            task
        })
        .collect();

    let mut cycle = 0u64;
    let deadlocked = loop {
        if tasks.iter().all(Task::done) {
            break false;
        }
        for ch in channels.iter_mut() {
            ch.advance_to(cycle);
        }
        let mut progressed = false;
        for task in tasks.iter_mut() {
            if task.done() || task.ready > cycle {
                continue;
            }
            let fired = match task.events[task.pc] {
                Event::Write(f) => {
                    let ch = &mut channels[f];
                    ch.can_write() && {
                        ch.writes.push(cycle);
                        stall[f] += cycle - task.waiting_since;
                        true
                    }
                }
                Event::Read(f) => {
                    let ch = &mut channels[f];
                    ch.can_read(cycle) && {
                        ch.reads.push(cycle);
                        stall[f] += cycle - task.waiting_since;
                        true
                    }
                }
                Event::Compute(_) => unreachable!("settled tasks sit on channel ops"),
            };
            if fired {
                progressed = true;
                task.pc += 1;
                task.ready = cycle + 1;
                task.settle();
            }
        }
        for ch in channels.iter_mut() {
            ch.peak = ch.peak.max(ch.occupancy());
        }
        if progressed {
            cycle += 1;
            continue;
        }
        let next_task = tasks
            .iter()
            .filter(|t| !t.done() && t.ready > cycle)
            .map(|t| t.ready)
            .min();
        let next_channel = channels.iter().filter_map(|ch| ch.next_change(cycle)).min();
        match next_task.into_iter().chain(next_channel).min() {
            Some(next) => cycle = next,
            None => break true,
        }
    };

    let latency = tasks.iter().map(|t| t.ready).max().unwrap_or(0);
    let mut blocked = Vec::new();
    if deadlocked {
        for (id, task) in tasks.iter().enumerate() {
            if task.done() {
                continue;
            }
            let (fifo, reason) = match task.events[task.pc] {
                Event::Write(f) => (f, BlockReason::Full),
                Event::Read(f) => (f, BlockReason::Empty),
                Event::Compute(_) => unreachable!(),
            };
            stall[fifo] += latency - task.waiting_since;
            blocked.push(BlockedTask {
                task: id,
                fifo,
                reason,
            });
        }
    }
    Ok(SimResult {
        latency,
        deadlocked,
        deadlock: deadlocked.then(|| DeadlockInfo {
            cycle: latency,
            blocked,
        }),
        peak_occupancy: channels.iter().map(|c| c.peak as u32).collect(),
        stall_cycles: stall,
    })
}
