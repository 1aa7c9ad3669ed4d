use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{binom2, ceil_pow_ratio};
use crate::rng::{rng_from_seed, trial_seed};
use crate::{Error, Result};

/// Values closer than this to a hyperplane count as lying on it.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// Points of `[0, 1)^d` in floating point, stored row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperPointSet {
    d: usize,
    coords: Vec<f64>,
}

impl HyperPointSet {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<HyperPointSet> {
        if d < 2 {
            return Err(Error::Precondition(format!("dimension must be at least 2, got {d}")));
        }
        if coords.len() % d != 0 {
            return Err(Error::Precondition("coordinate count is not a multiple of the dimension".into()));
        }
        if coords.iter().any(|&c| !(0.0..1.0).contains(&c)) {
            return Err(Error::Precondition("coordinates must lie in [0, 1)".into()));
        }
        Ok(HyperPointSet { d, coords })
    }

    pub fn random(n: usize, d: usize, seed: u64) -> HyperPointSet {
        let mut rng = rng_from_seed(seed);
        let coords = (0..n * d).map(|_| rng.gen::<f64>()).collect();
        HyperPointSet::new(d, coords).expect("uniform draws lie in [0, 1)")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }
}

/// `{x : normal . x = offset}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }

    pub fn axis(d: usize, axis: usize, offset: f64) -> Hyperplane {
        let mut normal = vec![0.0; d];
        normal[axis] = 1.0;
        Hyperplane { normal, offset }
    }

    /// The perpendicular bisector of `p` and `q`; `q` is on the positive side.
    pub fn bisector(p: &[f64], q: &[f64]) -> Hyperplane {
        let normal: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
        let offset = q.iter().zip(p).map(|(a, b)| (a * a - b * b) / 2.0).sum();
        Hyperplane { normal, offset }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperSeparation {
    pub hyperplanes: Vec<Hyperplane>,
    pub grid_n: u64,
    /// `d (N - 1)` axis-parallel hyperplanes come first.
    pub grid_hyperplanes: usize,
    pub colliding_pairs: u64,
    pub active_cells: u64,
}

impl HyperSeparation {
    pub fn size(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn extra(&self) -> usize {
        self.hyperplanes.len() - self.grid_hyperplanes
    }
}

fn sign(v: f64) -> Result<bool> {
    if v.abs() < SIGN_TOLERANCE {
        return Err(Error::Verification(format!("a point lies within {SIGN_TOLERANCE} of a hyperplane")));
    }
    Ok(v > 0.0)
}

/// Whether every two points get different sign vectors. Points too close to
/// a hyperplane are an error.
pub fn separates_d(h: &HyperPointSet, planes: &[Hyperplane]) -> Result<bool> {
    let words = planes.len().div_ceil(64);
    let mut keys: Vec<Vec<u64>> = Vec::with_capacity(h.len());
    for i in 0..h.len() {
        let mut key = vec![0u64; words];
        for (j, pl) in planes.iter().enumerate() {
            if sign(pl.value(h.point(i)))? {
                key[j / 64] |= 1 << (j % 64);
            }
        }
        keys.push(key);
    }
    keys.sort_unstable();
    Ok(keys.windows(2).all(|w| w[0] != w[1]))
}

/// The `N^d` grid with `N = ceil(n^(2/(d+1)))`, plus perpendicular bisectors
/// inside every crowded cell: points of a cell are paired up, each pair gets
/// its bisector, and groups still sharing a sign vector are paired again.
pub fn grid_separator_d(h: &HyperPointSet) -> Result<HyperSeparation> {
    let (n, d) = (h.len(), h.dim());
    let grid_n = ceil_pow_ratio(n as u64, 2, d as u32 + 1).max(1);
    let mut planes = Vec::new();
    for axis in 0..d {
        for i in 1..grid_n {
            planes.push(Hyperplane::axis(d, axis, i as f64 / grid_n as f64));
        }
    }
    let grid_hyperplanes = planes.len();
    let mut keyed: Vec<(Vec<u64>, usize)> = (0..n)
        .map(|i| (h.point(i).iter().map(|&x| ((x * grid_n as f64) as u64).min(grid_n - 1)).collect(), i))
        .collect();
    keyed.sort_unstable();
    let mut colliding = 0;
    let mut active = 0;
    for cell in keyed.chunk_by(|a, b| a.0 == b.0) {
        if cell.len() < 2 {
            continue;
        }
        active += 1;
        colliding += binom2(cell.len() as u64);
        let mut work = vec![cell.iter().map(|c| c.1).collect::<Vec<usize>>()];
        while let Some(group) = work.pop() {
            let first = planes.len();
            for pair in group.chunks_exact(2) {
                planes.push(Hyperplane::bisector(h.point(pair[0]), h.point(pair[1])));
            }
            let mut split: Vec<(Vec<bool>, usize)> = Vec::with_capacity(group.len());
            for &p in &group {
                let s = planes[first..].iter().map(|pl| sign(pl.value(h.point(p)))).collect::<Result<Vec<bool>>>()?;
                split.push((s, p));
            }
            split.sort_unstable();
            for part in split.chunk_by(|a, b| a.0 == b.0) {
                if part.len() >= 2 {
                    work.push(part.iter().map(|x| x.1).collect());
                }
            }
        }
    }
    let sep = HyperSeparation { hyperplanes: planes, grid_n, grid_hyperplanes, colliding_pairs: colliding, active_cells: active };
    if !separates_d(h, &sep.hyperplanes)? {
        return Err(Error::Verification("grid separator left two points together".into()));
    }
    Ok(sep)
}

/// `grid_separator_d` on `n` random points of `[0, 1)^d`, redrawing the
/// points (up to 8 times) when a point falls too close to a hyperplane.
pub fn hyper_trial(n: usize, d: usize, seed: u64) -> Result<HyperSeparation> {
    let mut last = Error::Verification("no attempt made".into());
    for attempt in 0..8 {
        let s = if attempt == 0 { seed } else { trial_seed(seed, attempt) };
        match grid_separator_d(&HyperPointSet::random(n, d, s)) {
            Ok(sep) => return Ok(sep),
            Err(e @ Error::Verification(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
