use alloc::vec::Vec;

use super::{ceil_pow_ratio, random_points, study_seed};
use crate::geom::{CanonicalLine, Sign};
use crate::sepsys::perturb::lex_split;
use crate::sepsys::refine::Refinement;
use crate::sepsys::{FrameLine, PointSet};
use crate::solvers::{active_cells, grid_cells, grid_frame_lines, grid_separation};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TRelaxedSeparation {
    pub lines: Vec<CanonicalLine>,
    pub t: usize,
    pub grid_n: usize,
    /// `2 (N - 1)` grid lines come first in `lines`.
    pub grid_lines: usize,
    /// Cells holding more than `t` points.
    pub overfull_cells: usize,
}

impl TRelaxedSeparation {
    pub fn split_lines(&self) -> usize {
        self.lines.len() - self.grid_lines
    }
}

/// `ceil(n^((t+1)/(2t+1)))`.
pub fn t_relaxed_grid_size(n: usize, t: usize) -> usize {
    ceil_pow_ratio(n as u64, t as u32 + 1, 2 * t as u32 + 1).max(1) as usize
}

/// Lines leaving at most `t` points in every face: a grid, then halving
/// lines inside every cell holding more than `t` points until each part
/// holds at most `t`. For `t = 1` this is the grid separator.
pub fn t_relaxed_separator(ps: &PointSet, t: usize) -> Result<TRelaxedSeparation> {
    if t == 0 {
        return Err(Error::Precondition("t must be at least 1".into()));
    }
    let grid_n = t_relaxed_grid_size(ps.len(), t);
    if t == 1 {
        let g = grid_separation(ps, grid_n)?;
        let overfull_cells = g.active_cells;
        return Ok(TRelaxedSeparation { lines: g.lines, t, grid_n, grid_lines: g.grid_lines, overfull_cells });
    }
    let cells = grid_cells(ps, grid_n)?;
    let mut frame = grid_frame_lines(ps, grid_n);
    let grid_lines = frame.len();
    let mut overfull_cells = 0;
    for mut group in active_cells(&cells, grid_n) {
        if group.len() > t {
            overfull_cells += 1;
            group.sort_by(|&a, &b| ps.cmp_lex(a, b));
            halve_until(ps, &group, t, &mut frame);
        }
    }
    Ok(TRelaxedSeparation {
        lines: frame.iter().map(|l| ps.unprepare(l)).collect(),
        t,
        grid_n,
        grid_lines,
        overfull_cells,
    })
}

fn halve_until(ps: &PointSet, sorted: &[usize], t: usize, out: &mut Vec<FrameLine>) {
    if sorted.len() <= t {
        return;
    }
    let half = sorted.len().div_ceil(2);
    out.push(lex_split(ps, sorted[half - 1], sorted[half]));
    halve_until(ps, &sorted[..half], t, out);
    halve_until(ps, &sorted[half..], t, out);
}

/// Largest number of points sharing a sign vector; a point on a line is
/// told apart from points on either side.
pub fn max_face_load(ps: &PointSet, lines: &[CanonicalLine]) -> usize {
    let mut r = Refinement::new(ps.len());
    for line in lines {
        if r.is_done() {
            break;
        }
        let fl = ps.prepare(line);
        r.split_by(|k| match ps.side_frame(&fl, k) {
            Sign::Negative => 0,
            Sign::Zero => 1,
            Sign::Positive => 2,
        });
    }
    r.classes().map(|c| c.len()).max().unwrap_or(ps.len().min(1))
}

/// One trial of the t-relaxed study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TRelaxRow {
    pub n: u64,
    pub t: u64,
    pub trial: u64,
    pub seed: u64,
    pub lines: u64,
    pub grid_n: u64,
    pub split_lines: u64,
    pub overfull_cells: u64,
    pub max_face_load: u64,
}

pub fn trelax_trial(n: u64, t: usize, trial: u64, seed: u64) -> Result<TRelaxRow> {
    let s = study_seed(seed, n, trial);
    let ps = random_points(n as usize, s);
    let sep = t_relaxed_separator(&ps, t)?;
    Ok(TRelaxRow {
        n,
        t: t as u64,
        trial,
        seed: s,
        lines: sep.lines.len() as u64,
        grid_n: sep.grid_n as u64,
        split_lines: sep.split_lines() as u64,
        overfull_cells: sep.overfull_cells as u64,
        max_face_load: max_face_load(&ps, &sep.lines) as u64,
    })
}
