// SPDX-License-Identifier: Apache-2.0

//! File formats, a parallel evaluator and report writers around
//! `fifo-advisor-core`. The `fifo-advisor` binary is built on top of this.

pub mod config;
pub mod format;
pub mod parallel;
pub mod report;
pub mod suite;

pub use config::{parse_config, write_config};
pub use format::{parse_trace, write_trace, ParseError};
pub use parallel::Parallel;
pub use suite::generate_suite;
