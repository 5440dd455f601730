// SPDX-License-Identifier: Apache-2.0

//! Pruned search spaces: one dimension per FIFO or per FIFO group, each an
//! ascending list of breakpoint depths.

use alloc::vec::Vec;

use rand::Rng;

use crate::memory;
use crate::trace::{FifoConfig, FifoId, TraceProgram};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Dimension {
    /// FIFOs that always share this dimension's depth.
    pub fifos: Vec<FifoId>,
    pub candidates: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SearchSpace {
    pub dims: Vec<Dimension>,
    fifo_count: usize,
}

impl SearchSpace {
    pub fn per_fifo(program: &TraceProgram) -> Self {
        let dims = program
            .fifos()
            .iter()
            .map(|f| Dimension {
                fifos: alloc::vec![f.id],
                candidates: memory::breakpoints(f.width, program.upper_bound(f.id)),
            })
            .collect();
        Self {
            dims,
            fifo_count: program.fifo_count(),
        }
    }

    /// One dimension per group cell. A group's candidates come from its
    /// shared width and its smallest member bound. Groups mixing widths are
    /// split back into single FIFOs.
    pub fn grouped(program: &TraceProgram) -> Self {
        let mut dims = Vec::new();
        for cell in program.fifo_groups() {
            let width = program.fifos()[cell[0]].width;
            if cell.iter().any(|&f| program.fifos()[f].width != width) {
                log::warn!(
                    "group `{}` mixes bit-widths; sampling its fifos individually",
                    program.fifos()[cell[0]].group.as_deref().unwrap_or("")
                );
                for &f in &cell {
                    dims.push(Dimension {
                        fifos: alloc::vec![f],
                        candidates: memory::breakpoints(program.fifos()[f].width, program.upper_bound(f)),
                    });
                }
                continue;
            }
            let upper = cell.iter().map(|&f| program.upper_bound(f)).min().unwrap_or(2);
            dims.push(Dimension {
                candidates: memory::breakpoints(width, upper),
                fifos: cell,
            });
        }
        Self {
            dims,
            fifo_count: program.fifo_count(),
        }
    }

    pub fn config(&self, index: &[usize]) -> FifoConfig {
        let mut depths = alloc::vec![0u32; self.fifo_count];
        for (dim, &i) in self.dims.iter().zip(index) {
            for &f in &dim.fifos {
                depths[f] = dim.candidates[i];
            }
        }
        FifoConfig::from_trusted(depths)
    }

    /// Index of the largest candidate of every dimension.
    pub fn top(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.candidates.len() - 1).collect()
    }

    /// Dimensions with more than one candidate.
    pub fn movable(&self) -> Vec<usize> {
        (0..self.dims.len())
            .filter(|&i| self.dims[i].candidates.len() > 1)
            .collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        self.dims
            .iter()
            .map(|d| rng.gen_range(0..d.candidates.len()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Event, FifoDecl, TaskTrace};
    use alloc::vec;

    #[test]
    fn grouped_uses_smallest_bound_and_splits_mixed_widths() {
        let p = TraceProgram::new(
            "g",
            vec![
                FifoDecl::new(0, "a0", 32).with_group("a").with_depth(3000),
                FifoDecl::new(1, "a1", 32).with_group("a").with_depth(1500),
                FifoDecl::new(2, "m0", 32).with_group("m"),
                FifoDecl::new(3, "m1", 8).with_group("m"),
                FifoDecl::new(4, "solo", 32),
            ],
            vec![
                TaskTrace::new(0, "p", vec![Event::Write(2), Event::Write(3)]),
                TaskTrace::new(1, "c", vec![Event::Read(2), Event::Read(3)]),
            ],
        )
        .unwrap();
        let s = SearchSpace::grouped(&p);
        assert_eq!(s.dims.len(), 4);
        assert_eq!(s.dims[0].fifos, vec![0, 1]);
        assert_eq!(s.dims[0].candidates, vec![32, 1024, 1500]);
        assert_eq!(s.dims[1].fifos, vec![2]);
        assert_eq!(s.dims[2].fifos, vec![3]);
        assert_eq!(s.config(&s.top()).depths(), &[1500, 1500, 2, 2, 2]);
        assert_eq!(s.movable(), vec![0]);

        let per = SearchSpace::per_fifo(&p);
        assert_eq!(per.dims.len(), 5);
        assert_eq!(per.config(&per.top()).depths(), p.upper_bounds().as_slice());
    }
}
