use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::family::Family;
use crate::geom::{CanonicalLine, Sign};
use crate::sepsys::refine::Refinement;
use crate::sepsys::{candidate_lines, PointSet, SeparationMode};
use crate::Result;

/// Classes of points not yet separated from each other.
pub(crate) struct Classes {
    refinement: Refinement,
    class_of: Vec<u32>,
    sizes: Vec<u32>,
    members: Vec<u32>,
    counts: Vec<u32>,
    pairs: u64,
}

const NONE: u32 = u32::MAX;

fn side_slot(s: Sign) -> usize {
    (s.as_i8() + 1) as usize
}

impl Classes {
    pub fn new(n: usize) -> Classes {
        let mut c = Classes {
            refinement: Refinement::new(n),
            class_of: vec![NONE; n],
            sizes: Vec::new(),
            members: Vec::new(),
            counts: Vec::new(),
            pairs: 0,
        };
        c.rebuild();
        c
    }

    fn rebuild(&mut self) {
        self.class_of.iter_mut().for_each(|c| *c = NONE);
        self.sizes.clear();
        self.members.clear();
        for (id, cls) in self.refinement.classes().enumerate() {
            self.sizes.push(cls.len() as u32);
            for &m in cls {
                self.class_of[m as usize] = id as u32;
                self.members.push(m);
            }
        }
        self.counts = vec![0; 3 * self.sizes.len()];
        self.pairs = self.sizes.iter().map(|&s| s as u64 * (s as u64 - 1) / 2).sum();
    }

    pub fn is_done(&self) -> bool {
        self.refinement.is_done()
    }

    pub fn apply(&mut self, fam: &Family<'_>, idx: usize) {
        self.refinement.split_by(|k| side_slot(fam.side(idx, k)) as u64);
        self.rebuild();
    }

    /// Number of currently unseparated pairs that candidate `idx` hits.
    pub fn gain(&mut self, fam: &Family<'_>, idx: usize) -> u64 {
        let total = self.pairs;
        match fam.line_frame_i64(idx) {
            Some((coords, p, d)) => {
                for &m in &self.members {
                    let q = coords[m as usize];
                    let cross = d[0] * (q[1] - p[1]) - d[1] * (q[0] - p[0]);
                    let c = self.class_of[m as usize] as usize;
                    self.counts[3 * c + (cross.signum() + 1) as usize] += 1;
                }
            }
            None => {
                for &m in &self.members {
                    let c = self.class_of[m as usize] as usize;
                    self.counts[3 * c + side_slot(fam.side(idx, m as usize))] += 1;
                }
            }
        }
        let mut same = 0u64;
        for v in self.counts.iter_mut() {
            same += *v as u64 * (*v as u64).saturating_sub(1) / 2;
            *v = 0;
        }
        total - same
    }
}

/// Lazy greedy over the candidates in `pool` (all candidates if `None`).
/// Returns the chosen candidate indices, or `None` if the pool cannot
/// separate the set.
pub(crate) fn greedy_indices(fam: &Family<'_>, pool: Option<&[usize]>) -> Option<Vec<usize>> {
    let mut classes = Classes::new(fam.ps.len());
    let mut heap: BinaryHeap<(u64, Reverse<usize>)> = BinaryHeap::new();
    let mut push_all = |classes: &mut Classes, idx: usize| {
        let g = classes.gain(fam, idx);
        if g > 0 {
            heap.push((g, Reverse(idx)));
        }
    };
    match pool {
        Some(p) => p.iter().for_each(|&i| push_all(&mut classes, i)),
        None => (0..fam.len()).for_each(|i| push_all(&mut classes, i)),
    }
    let mut chosen = Vec::new();
    let mut evals = 0u64;
    while !classes.is_done() {
        evals += 1;
        let (stored, Reverse(idx)) = heap.pop()?;
        let g = classes.gain(fam, idx);
        if g == stored {
            chosen.push(idx);
            classes.apply(fam, idx);
        } else if g > 0 {
            heap.push((g, Reverse(idx)));
        }
    }
    log::debug!("greedy: {} picks, {evals} re-evaluations", chosen.len());
    Some(chosen)
}

/// Repeatedly add the candidate hitting the most unseparated pairs; ties go
/// to the earlier candidate.
pub fn greedy_hitting_set(ps: &PointSet, mode: SeparationMode) -> Result<Vec<CanonicalLine>> {
    let cands = candidate_lines(ps)?;
    let fam = Family::new(ps, &cands, mode);
    let chosen = greedy_indices(&fam, None).expect("the full family separates any set");
    let lines: Vec<CanonicalLine> = chosen.iter().map(|&i| fam.realize(i)).collect();
    super::assert_separates(ps, &lines, mode)?;
    Ok(lines)
}
