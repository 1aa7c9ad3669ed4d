//! Strict candidates: each candidate line pushed off its points in every
//! order-preserving way.
//!
//! For a line carrying `k` points sorted along it, a cut puts the first
//! `prefix` points on `prefix_side` and the rest on the other side, while
//! every point off the line keeps its side. There are `2k` distinct cuts per
//! line (`prefix` in `1..=k`, either side).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::perturb::{self, Pivot};
use super::{CandidateLines, PointSet};
use crate::geom::{CanonicalLine, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    pub line: u32,
    pub prefix: u32,
    pub prefix_side: Sign,
}

/// All cuts of a candidate line set.
#[derive(Clone, Debug)]
pub struct CutSet {
    cuts: Vec<Cut>,
}

impl CutSet {
    pub fn new(cands: &CandidateLines) -> CutSet {
        let mut cuts = Vec::new();
        for l in 0..cands.len() {
            let k = on_line_count(cands, l) as u32;
            for prefix in 1..=k {
                for prefix_side in [Sign::Negative, Sign::Positive] {
                    cuts.push(Cut { line: l as u32, prefix, prefix_side });
                }
            }
        }
        CutSet { cuts }
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn get(&self, i: usize) -> Cut {
        self.cuts[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = Cut> + '_ {
        self.cuts.iter().copied()
    }
}

fn on_line_count(cands: &CandidateLines, l: usize) -> usize {
    let m = cands.incident_pairs(l).len();
    // m = k (k - 1) / 2
    let mut k = 2;
    while k * (k - 1) / 2 < m {
        k += 1;
    }
    k
}

impl CandidateLines {
    /// Points on line `l` in cut order (from the first defining point
    /// towards the second).
    pub fn cut_order(&self, ps: &PointSet, l: usize) -> Vec<usize> {
        if self.incident_pairs(l).len() == 1 {
            let (a, b) = self.defining_pair(l);
            return vec![a, b];
        }
        self.on_line_points(ps, l)
    }

    /// Side of point `k` under `cut`; never zero.
    pub fn cut_side(&self, ps: &PointSet, cut: Cut, k: usize) -> Sign {
        let l = cut.line as usize;
        let s = self.side(ps, l, k);
        if !s.is_zero() {
            return s;
        }
        let order = self.cut_order(ps, l);
        let pos = order.iter().position(|&p| p == k).expect("point on line");
        if (pos as u32) < cut.prefix {
            cut.prefix_side
        } else {
            -cut.prefix_side
        }
    }

    /// Sides of all points under `cut`.
    pub fn cut_sides(&self, ps: &PointSet, cut: Cut) -> Vec<Sign> {
        let l = cut.line as usize;
        let mut s: Vec<Sign> = (0..ps.len()).map(|k| self.side(ps, l, k)).collect();
        for (pos, &p) in self.cut_order(ps, l).iter().enumerate() {
            s[p] = if (pos as u32) < cut.prefix { cut.prefix_side } else { -cut.prefix_side };
        }
        s
    }

    /// A concrete line through no point that realizes `cut`.
    pub fn realize_cut(&self, ps: &PointSet, cut: Cut) -> CanonicalLine {
        let l = cut.line as usize;
        let base = self.frame_line(ps, l);
        let order = self.cut_order(ps, l);
        let k = order.len() as u32;
        assert!(cut.prefix >= 1 && cut.prefix <= k, "cut prefix out of range");
        let fl = if cut.prefix == k {
            perturb::translate(&base, cut.prefix_side, &BigInt::one())
        } else {
            let p = cut.prefix as usize;
            let pivot = Pivot::on_segment(ps, order[p - 1], order[p], 1, 2);
            perturb::tilt(ps, &base, &pivot, cut.prefix_side).expect("midpoint of consecutive points is free")
        };
        ps.unprepare(&fl)
    }
}
