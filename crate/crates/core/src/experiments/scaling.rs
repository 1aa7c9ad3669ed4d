use alloc::vec::Vec;

use rand::Rng;

use super::{binom2, fit_loglog, mean_sd, random_points, study_seed};
use crate::rng::{rng_from_seed, splitmix64};
use crate::sepsys::PointSet;
use crate::solvers::{active_cells, grid_cells, grid_separation, grid_size_for};
use crate::Result;

/// One trial of the grid-separator scaling study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StudyRow {
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub separator_size: u64,
    pub grid_n: u64,
    pub colliding_pairs: u64,
    pub active_cells: u64,
    pub max_active_per_line: u64,
    /// Filled in by timed runs only.
    pub wall_time_ms: Option<u64>,
}

/// `C(n, 2) / N^2`: the expected number of pairs sharing a grid cell.
pub fn expected_colliding_pairs(n: u64, grid_n: u64) -> f64 {
    binom2(n) as f64 / (grid_n as f64 * grid_n as f64)
}

/// `2 (N - 1) + C(n, 2) / N^2` with `N = ceil(n^(2/3))`.
pub fn expected_grid_size(n: u64) -> f64 {
    let g = grid_size_for(n as usize) as u64;
    2.0 * (g as f64 - 1.0) + expected_colliding_pairs(n, g)
}

/// A line through two independent uniform points on the boundary of the
/// unit square, as a pair of points.
pub fn random_boundary_line<R: Rng + ?Sized>(rng: &mut R) -> [(f64, f64); 2] {
    let mut p = || {
        let s = rng.gen::<f64>() * 4.0;
        let f = s - libm::floor(s);
        match s as u32 {
            0 => (f, 0.0),
            1 => (1.0, f),
            2 => (1.0 - f, 1.0),
            _ => (0.0, 1.0 - f),
        }
    };
    loop {
        let (a, b) = (p(), p());
        if a != b {
            return [a, b];
        }
    }
}

/// Largest number of active cells (cells with two or more points) whose
/// interior meets one of `lines`. Evaluated in floating point.
pub fn max_active_per_line(active: &[(usize, usize)], grid_n: usize, lines: &[[(f64, f64); 2]]) -> u64 {
    let h = 1.0 / grid_n as f64;
    lines
        .iter()
        .map(|&[(px, py), (qx, qy)]| {
            let (dx, dy) = (qx - px, qy - py);
            active
                .iter()
                .filter(|&&(cx, cy)| {
                    let (x0, y0) = (cx as f64 * h, cy as f64 * h);
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for (x, y) in [(x0, y0), (x0 + h, y0), (x0, y0 + h), (x0 + h, y0 + h)] {
                        let v = dx * (y - py) - dy * (x - px);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    lo < 0.0 && hi > 0.0
                })
                .count() as u64
        })
        .max()
        .unwrap_or(0)
}

/// Grid-separate `random_points(n)` and measure it.
///
/// The separator is the `ceil(n^(2/3))` grid with every crowded cell split;
/// `test_lines` random boundary-to-boundary lines are checked against the
/// active cells.
pub fn scaling_trial(n: u64, trial: u64, seed: u64, test_lines: usize) -> Result<StudyRow> {
    let s = study_seed(seed, n, trial);
    let ps = random_points(n as usize, s);
    let grid_n = grid_size_for(n as usize);
    let g = grid_separation(&ps, grid_n)?;
    let active = active_cell_coords(&ps, grid_n)?;
    let mut rng = rng_from_seed(splitmix64(s));
    let lines: Vec<[(f64, f64); 2]> = (0..test_lines).map(|_| random_boundary_line(&mut rng)).collect();
    Ok(StudyRow {
        n,
        trial,
        seed: s,
        separator_size: g.lines.len() as u64,
        grid_n: grid_n as u64,
        colliding_pairs: g.colliding_pairs,
        active_cells: g.active_cells as u64,
        max_active_per_line: max_active_per_line(&active, grid_n, &lines),
        wall_time_ms: None,
    })
}

fn active_cell_coords(ps: &PointSet, grid_n: usize) -> Result<Vec<(usize, usize)>> {
    let cells = grid_cells(ps, grid_n)?;
    Ok(active_cells(&cells, grid_n).iter().map(|g| (cells[g[0]].0, cells[g[0]].1)).collect())
}

/// Aggregates of one value of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPoint {
    pub n: u64,
    pub trials: usize,
    pub grid_n: u64,
    pub mean_size: f64,
    pub sd_size: f64,
    pub expected_size: f64,
    /// `(mean_size - expected_size) / expected_size`.
    pub relative_error: f64,
    pub mean_colliding_pairs: f64,
    pub expected_colliding_pairs: f64,
    pub mean_active_cells: f64,
    pub max_active_per_line: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSummary {
    pub points: Vec<ScalingPoint>,
    /// Log-log slope of mean size against `n`; `None` for a single `n`.
    pub exponent: Option<f64>,
}

/// Per-`n` means and the fitted exponent. Row order does not matter.
pub fn summarize_scaling(rows: &[StudyRow]) -> ScalingSummary {
    let mut sorted: Vec<&StudyRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.n, r.trial));
    let mut points = Vec::new();
    for group in sorted.chunk_by(|a, b| a.n == b.n) {
        let n = group[0].n;
        let f = |g: fn(&StudyRow) -> u64| group.iter().map(|r| g(r) as f64).collect::<Vec<f64>>();
        let (mean_size, sd_size) = mean_sd(&f(|r| r.separator_size));
        let expected_size = expected_grid_size(n);
        let grid_n = group[0].grid_n;
        points.push(ScalingPoint {
            n,
            trials: group.len(),
            grid_n,
            mean_size,
            sd_size,
            expected_size,
            relative_error: (mean_size - expected_size) / expected_size,
            mean_colliding_pairs: mean_sd(&f(|r| r.colliding_pairs)).0,
            expected_colliding_pairs: expected_colliding_pairs(n, grid_n),
            mean_active_cells: mean_sd(&f(|r| r.active_cells)).0,
            max_active_per_line: group.iter().map(|r| r.max_active_per_line).max().unwrap_or(0),
        });
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_size)).collect();
    ScalingSummary { exponent: fit_loglog(&xy), points }
}

/// Colliding pairs and active cells of `random_points(n)` in the
/// `ceil(n^(2/3))` grid, without building a separator.
pub fn collision_trial(n: u64, trial: u64, seed: u64) -> Result<(u64, u64)> {
    let ps = random_points(n as usize, study_seed(seed, n, trial));
    let grid_n = grid_size_for(n as usize);
    let cells = grid_cells(&ps, grid_n)?;
    let groups = active_cells(&cells, grid_n);
    Ok((groups.iter().map(|g| binom2(g.len() as u64)).sum(), groups.len() as u64))
}
