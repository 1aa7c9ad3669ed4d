use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::halving::halving_on;
use crate::geom::CanonicalLine;
use crate::sepsys::{find_unseparated_prepared, perturb, FrameLine, PointSet, SeparationMode};
use crate::{Error, Result};

/// Smallest `N` with `N^3 >= n^2`, i.e. `ceil(n^(2/3))`.
pub fn grid_size_for(n: usize) -> usize {
    let n2 = (n as u128) * (n as u128);
    let mut g = libm::cbrt(n2 as f64) as u128;
    while g * g * g < n2 {
        g += 1;
    }
    while g > 1 && (g - 1) * (g - 1) * (g - 1) >= n2 {
        g -= 1;
    }
    g.max(1) as usize
}

#[derive(Clone, Debug)]
pub struct GridSeparation {
    pub lines: Vec<CanonicalLine>,
    pub grid_size: usize,
    /// `2 (N - 1)` axis-parallel lines come first in `lines`.
    pub grid_lines: usize,
    /// Lines separating points that share a cell.
    pub cell_lines: usize,
    /// Lines added because a point lies on a grid line.
    pub repair_lines: usize,
    pub colliding_pairs: u64,
    pub active_cells: usize,
    /// Points lying exactly on a grid line.
    pub boundary_points: Vec<usize>,
}

/// Cell index along one axis: `ceil(X N / D) - 1`, clamped to `[0, N)`,
/// plus whether the coordinate lies on a grid line.
fn axis_cell(coord: &BigInt, n: usize, denom: &BigInt) -> (usize, bool) {
    let scaled = coord * BigInt::from(n);
    let (q, r) = (&scaled - 1i32).div_mod_floor(denom);
    let idx = q.to_i64().unwrap_or(-1).clamp(0, n as i64 - 1) as usize;
    let on = r == denom - 1i32 && !coord.is_zero() && &scaled != &(denom * BigInt::from(n));
    (idx, on)
}

/// Grid cell of every point; points on a grid line go to the lower cell.
pub fn grid_cells(ps: &PointSet, n: usize) -> Result<Vec<(usize, usize, bool)>> {
    let d = ps.denominator().clone();
    let mut out = Vec::with_capacity(ps.len());
    if let (Some(coords), Some(di)) = (ps.small_coords(), d.to_i128()) {
        for c in coords {
            let mut cell = [0usize; 2];
            let mut on = false;
            for axis in 0..2 {
                let v = c[axis] as i128;
                if v < 0 || v > di {
                    return Err(Error::Precondition("points must lie in the unit square".into()));
                }
                let s = v * n as i128;
                let q = Integer::div_floor(&(s - 1), &di);
                cell[axis] = q.clamp(0, n as i128 - 1) as usize;
                on |= v != 0 && v != di && s % di == 0;
            }
            out.push((cell[0], cell[1], on));
        }
        return Ok(out);
    }
    for k in 0..ps.len() {
        let (x, y) = ps.frame_big(k);
        if x.is_negative() || y.is_negative() || x > d || y > d {
            return Err(Error::Precondition("points must lie in the unit square".into()));
        }
        let (cx, ox) = axis_cell(&x, n, &d);
        let (cy, oy) = axis_cell(&y, n, &d);
        out.push((cx, cy, ox || oy));
    }
    Ok(out)
}

/// Indices of points grouped by cell; only cells holding two or more.
pub fn active_cells(cells: &[(usize, usize, bool)], n: usize) -> Vec<Vec<usize>> {
    let mut keyed: Vec<(u64, usize)> =
        cells.iter().enumerate().map(|(k, &(cx, cy, _))| (cx as u64 * n as u64 + cy as u64, k)).collect();
    keyed.sort_unstable();
    let mut out = Vec::new();
    let mut s = 0;
    while s < keyed.len() {
        let mut e = s + 1;
        while e < keyed.len() && keyed[e].0 == keyed[s].0 {
            e += 1;
        }
        if e - s >= 2 {
            out.push(keyed[s..e].iter().map(|&(_, k)| k).collect());
        }
        s = e;
    }
    out
}

pub fn grid_separation(ps: &PointSet, n_grid: usize) -> Result<GridSeparation> {
    assert!(n_grid >= 1, "grid size must be positive");
    let cells = grid_cells(ps, n_grid)?;
    let mut frame = grid_frame_lines(ps, n_grid);
    let grid_lines = frame.len();
    let groups = active_cells(&cells, n_grid);
    let mut colliding = 0u64;
    for g in &groups {
        let k = g.len() as u64;
        colliding += k * (k - 1) / 2;
        if g.len() == 2 {
            frame.push(perturb::split_pair(ps, g[0], g[1]));
        } else {
            match halving_on(ps, g) {
                Ok(ls) => frame.extend(ls),
                Err(e) => log::warn!("cell of {} points left to repair: {e}", g.len()),
            }
        }
    }
    let cell_lines = frame.len() - grid_lines;
    let mut repair_lines = 0;
    while let Some(p) = find_unseparated_prepared(ps, &frame, SeparationMode::Strict) {
        frame.push(perturb::split_pair(ps, p.i, p.j));
        repair_lines += 1;
    }
    let boundary_points = cells.iter().enumerate().filter(|(_, c)| c.2).map(|(k, _)| k).collect();
    Ok(GridSeparation {
        lines: frame.iter().map(|l| ps.unprepare(l)).collect(),
        grid_size: n_grid,
        grid_lines,
        cell_lines,
        repair_lines,
        colliding_pairs: colliding,
        active_cells: groups.len(),
        boundary_points,
    })
}

/// The lines `x = i/N` and `y = i/N` for `0 < i < N`, interleaved.
pub(crate) fn grid_frame_lines(ps: &PointSet, n_grid: usize) -> Vec<FrameLine> {
    let d = ps.denominator();
    let mut frame = Vec::with_capacity(2 * n_grid.saturating_sub(1));
    for i in 1..n_grid {
        let off = -(d * BigInt::from(i));
        frame.push(normalize(BigInt::from(n_grid), BigInt::zero(), off.clone()));
        frame.push(normalize(BigInt::zero(), BigInt::from(n_grid), off));
    }
    frame
}

fn normalize(a: BigInt, b: BigInt, c: BigInt) -> FrameLine {
    let g = a.gcd(&b).gcd(&c);
    FrameLine::from_big(a / &g, b / &g, c / &g)
}

/// The `2 (N - 1)` grid lines plus separators for points sharing a cell.
pub fn grid_separator(ps: &PointSet, n_grid: usize) -> Result<Vec<CanonicalLine>> {
    Ok(grid_separation(ps, n_grid)?.lines)
}
