// SPDX-License-Identifier: Apache-2.0

//! BRAM_18K cost model for FIFOs and the pruned candidate depths derived
//! from it.

use alloc::vec::Vec;

use crate::trace::{TraceProgram, MIN_DEPTH};

/// One aspect ratio a BRAM primitive can be configured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BramShape {
    pub rows: u32,
    pub width: u32,
}

/// Target memory primitive: its shapes in allocation order and the size
/// below which a FIFO becomes a shift register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BramModel {
    pub shapes: &'static [BramShape],
    pub shift_register_bits: u64,
}

/// BRAM_18K on UltraScale+ devices.
pub const BRAM_18K: BramModel = BramModel {
    shapes: &[
        BramShape { rows: 1024, width: 18 },
        BramShape { rows: 2048, width: 9 },
        BramShape { rows: 4096, width: 4 },
        BramShape { rows: 8192, width: 2 },
        BramShape { rows: 16384, width: 1 },
    ],
    shift_register_bits: 1024,
};

impl BramModel {
    pub fn is_shift_register(&self, depth: u32, width: u32) -> bool {
        depth <= MIN_DEPTH || u64::from(depth) * u64::from(width) <= self.shift_register_bits
    }

    /// Number of primitives a FIFO of `depth` tokens of `width` bits maps to.
    ///
    /// Wide shapes are allocated first; whatever width remains spills into
    /// the next narrower shape, and a leftover that fits in a single
    /// primitive's rows takes exactly one more.
    pub fn fifo_bram_count(&self, depth: u32, width: u32) -> u32 {
        if self.is_shift_register(depth, width) {
            return 0;
        }
        let mut count = 0u32;
        let mut w = width;
        for shape in self.shapes {
            count += (w / shape.width) * depth.div_ceil(shape.rows);
            w %= shape.width;
            if w > 0 && depth <= shape.rows {
                count += 1;
                w = 0;
            }
        }
        count
    }

    /// Depths in `[2, upper]` that are the largest achieving their BRAM
    /// count, plus `upper` itself. Ascending, never empty.
    pub fn breakpoints(&self, width: u32, upper: u32) -> Vec<u32> {
        let upper = upper.max(MIN_DEPTH);
        // The count only steps after 2, after floor(bits / width), and after
        // multiples of a shape's row count.
        let mut candidates = Vec::new();
        candidates.push(MIN_DEPTH);
        let widest = u32::try_from(self.shift_register_bits / u64::from(width.max(1)))
            .unwrap_or(u32::MAX);
        candidates.push(widest);
        for shape in self.shapes {
            let mut d = shape.rows;
            while d < upper {
                candidates.push(d);
                d = match d.checked_add(shape.rows) {
                    Some(next) => next,
                    None => break,
                };
            }
        }
        candidates.retain(|&d| {
            d >= MIN_DEPTH
                && d < upper
                && self.fifo_bram_count(d + 1, width) > self.fifo_bram_count(d, width)
        });
        candidates.push(upper);
        candidates.sort_unstable();
        candidates.dedup();
        candidates
    }
}

pub fn is_shift_register(depth: u32, width: u32) -> bool {
    BRAM_18K.is_shift_register(depth, width)
}

pub fn fifo_bram_count(depth: u32, width: u32) -> u32 {
    BRAM_18K.fifo_bram_count(depth, width)
}

pub fn breakpoints(width: u32, upper: u32) -> Vec<u32> {
    BRAM_18K.breakpoints(width, upper)
}

/// Total BRAMs of a depth assignment. Panics if lengths differ.
pub fn config_bram_count(program: &TraceProgram, depths: &[u32]) -> u64 {
    assert_eq!(depths.len(), program.fifo_count(), "depth count mismatch");
    program
        .fifos()
        .iter()
        .zip(depths)
        .map(|(fifo, &d)| u64::from(fifo_bram_count(d, fifo.width)))
        .sum()
}

/// Candidate depths for every FIFO of a program.
pub fn program_breakpoints(program: &TraceProgram) -> Vec<Vec<u32>> {
    program
        .fifos()
        .iter()
        .map(|f| breakpoints(f.width, program.upper_bound(f.id)))
        .collect()
}
