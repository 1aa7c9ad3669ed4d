use alloc::vec::Vec;

use crate::geom::{CanonicalLine, Sign};
use crate::sepsys::{CandidateLines, CutSet, PointSet, SeparationMode};

/// The candidates a solver picks from.
///
/// Relaxed mode uses the candidate lines themselves. Strict mode uses their
/// cuts, since a line through two points never strictly separates them. A
/// fully collinear set has a single candidate line that hits nothing, so it
/// also falls back to cuts.
pub(crate) struct Family<'a> {
    pub ps: &'a PointSet,
    pub cands: &'a CandidateLines,
    cuts: Option<CutSet>,
}

impl<'a> Family<'a> {
    pub fn new(ps: &'a PointSet, cands: &'a CandidateLines, mode: SeparationMode) -> Family<'a> {
        let use_cuts = mode == SeparationMode::Strict || cands.len() == 1;
        Family { ps, cands, cuts: use_cuts.then(|| CutSet::new(cands)) }
    }

    pub fn len(&self) -> usize {
        match &self.cuts {
            Some(c) => c.len(),
            None => self.cands.len(),
        }
    }

    /// For a plain candidate line over coordinates below 2^30: the point
    /// coordinates, the first defining point and the direction to the
    /// second, so that the side is the sign of an `i64` cross product.
    #[inline]
    pub fn line_frame_i64(&self, idx: usize) -> Option<(&'a [[i64; 2]], [i64; 2], [i64; 2])> {
        if self.cuts.is_some() {
            return None;
        }
        let coords = self.ps.small_coords().filter(|_| self.ps.fits_i64_orient())?;
        let (a, b) = self.cands.defining_pair(idx);
        let (p, q) = (coords[a], coords[b]);
        Some((coords, p, [q[0] - p[0], q[1] - p[1]]))
    }

    #[inline]
    pub fn side(&self, idx: usize, k: usize) -> Sign {
        match &self.cuts {
            Some(c) => self.cands.cut_side(self.ps, c.get(idx), k),
            None => self.cands.side(self.ps, idx, k),
        }
    }

    pub fn sides(&self, idx: usize) -> Vec<Sign> {
        match &self.cuts {
            Some(c) => self.cands.cut_sides(self.ps, c.get(idx)),
            None => (0..self.ps.len()).map(|k| self.cands.side(self.ps, idx, k)).collect(),
        }
    }

    pub fn realize(&self, idx: usize) -> CanonicalLine {
        match &self.cuts {
            Some(c) => self.cands.realize_cut(self.ps, c.get(idx)),
            None => self.cands.line(self.ps, idx),
        }
    }

    /// Pair-hit bitmask of candidate `idx`, for at most 16 points.
    pub fn mask(&self, idx: usize) -> u128 {
        let n = self.ps.len();
        debug_assert!(n * (n - 1) / 2 <= 128);
        let s = self.sides(idx);
        let mut m = 0u128;
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if s[i] != s[j] {
                    m |= 1 << bit;
                }
                bit += 1;
            }
        }
        m
    }
}
