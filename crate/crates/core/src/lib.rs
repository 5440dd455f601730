// SPDX-License-Identifier: Apache-2.0

//! Design-space exploration of FIFO depths for dataflow programs.
//!
//! A [`TraceProgram`] captures one concrete execution of a set of tasks that
//! talk over single-producer single-consumer FIFO channels. Every candidate
//! depth assignment ([`FifoConfig`]) is scored by replaying the same trace
//! ([`sim`]) for latency and by a BRAM_18K cost model ([`memory`]) for
//! on-chip memory. The [`optimize`] module searches the pruned space for a
//! latency/memory Pareto frontier under a hard no-deadlock constraint.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, threading and
//! the command-line front end live in the `fifo-advisor` crate.

#![no_std]

extern crate alloc;

pub mod benchgen;
pub mod memory;
pub mod optimize;
pub mod sim;
pub mod trace;

pub use memory::{breakpoints, config_bram_count, fifo_bram_count, is_shift_register};
pub use sim::{simulate, SimResult, TimingMode};
pub use trace::{Event, FifoConfig, FifoDecl, FifoId, TaskId, TaskTrace, TraceProgram};
