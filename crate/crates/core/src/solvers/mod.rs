//! Separating-set solvers.

mod exact;
mod family;
mod greedy;
mod grid;
mod halving;
mod reweight;

pub use exact::{cell_bound, exact_separability, max_cells, EXACT_CAP};
pub use greedy::greedy_hitting_set;
pub(crate) use grid::grid_frame_lines;
pub use grid::{active_cells, grid_cells, grid_separation, grid_separator, grid_size_for, GridSeparation};
pub use halving::halving_separator;
pub use reweight::{
    reweight_approx, rounds_for_guess, sample_size, GuessRecord, SolveResult, SolverConfig, WeightState,
};

use crate::geom::CanonicalLine;
use crate::sepsys::{find_unseparated_pair, PointSet, SeparationMode};
use crate::{Error, Result};

/// `true` iff `lines` separate every pair of `ps` under `mode`.
pub fn verify(ps: &PointSet, lines: &[CanonicalLine], mode: SeparationMode) -> bool {
    find_unseparated_pair(ps, lines, mode).is_none()
}

pub(crate) fn assert_separates(ps: &PointSet, lines: &[CanonicalLine], mode: SeparationMode) -> Result<()> {
    match find_unseparated_pair(ps, lines, mode) {
        None => Ok(()),
        Some(p) => Err(Error::NotSeparating(p.i, p.j)),
    }
}

/// Lines bounding the number of points `lines` can tell apart.
pub fn face_lower_bound(n: usize, mode: SeparationMode) -> usize {
    cell_bound(n, mode)
}

#[cfg(test)]
mod tests;

