//! Monte-Carlo kernels for the random-point experiments.
//!
//! Everything here is a pure function of its parameters and a seed. Trial
//! `t` of a study draws from `trial_seed(seed, t)`, so trials can run in any
//! order or in parallel and aggregate to the same result.

mod balls;
mod hyper;
mod scaling;
mod trelax;

pub use balls::{
    birthday_bins, birthday_max_check, birthday_report, heavy_ball_bounds_check, heavy_ball_report, heavy_bound_factor, throw_balls,
    BallsBinsStats, BirthdayReport, HeavyBallReport,
};
pub use hyper::{grid_separator_d, hyper_trial, separates_d, HyperPointSet, HyperSeparation, Hyperplane};
pub use scaling::{
    collision_trial, expected_colliding_pairs, expected_grid_size, max_active_per_line, random_boundary_line, scaling_trial,
    summarize_scaling, ScalingPoint, ScalingSummary, StudyRow,
};
pub use trelax::{max_face_load, t_relaxed_grid_size, t_relaxed_separator, trelax_trial, TRelaxRow, TRelaxedSeparation};

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::Rng;

use crate::rng::{rng_from_seed, splitmix64, trial_seed};
use crate::sepsys::PointSet;

/// Random points are drawn on the grid `k / 2^40`.
pub const POINT_GRID_BITS: u32 = 40;

/// `n` distinct points uniform on the `2^-40` grid of `[0, 1)^2`.
pub fn random_points(n: usize, seed: u64) -> PointSet {
    let mut rng = rng_from_seed(seed);
    let mut seen = BTreeSet::new();
    let mut coords = Vec::with_capacity(n);
    while coords.len() < n {
        let p = [rng.gen_range(0..1i64 << POINT_GRID_BITS), rng.gen_range(0..1i64 << POINT_GRID_BITS)];
        if seen.insert(p) {
            coords.push(p);
        }
    }
    PointSet::from_scaled(1i64 << POINT_GRID_BITS, coords).expect("coordinates are distinct")
}

/// Seed of trial `trial` at size `n` in a study seeded with `seed`.
pub fn study_seed(seed: u64, n: u64, trial: u64) -> u64 {
    trial_seed(seed ^ splitmix64(n), trial)
}

/// `ceil(n^(p/q))`, exactly.
pub fn ceil_pow_ratio(n: u64, p: u32, q: u32) -> u64 {
    assert!(q > 0, "root index must be positive");
    if n <= 1 {
        return n;
    }
    let target = BigUint::from(n).pow(p);
    let mut g = libm::pow(n as f64, p as f64 / q as f64).ceil().max(1.0) as u64;
    while BigUint::from(g).pow(q) < target {
        g += 1;
    }
    while g > 1 && BigUint::from(g - 1).pow(q) >= target {
        g -= 1;
    }
    g
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// distinct `x` or any non-positive value.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (libm::log(x), libm::log(y))).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 1e-12) {
        return None;
    }
    Some(sxy / sxx)
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, libm::sqrt(var))
}

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Normal-approximation 99% confidence interval for the mean.
pub fn ci99(xs: &[f64]) -> (f64, f64) {
    let (m, sd) = mean_sd(xs);
    let h = if xs.is_empty() { 0.0 } else { Z99 * sd / libm::sqrt(xs.len() as f64) };
    (m - h, m + h)
}

/// `ln n / ln ln n`, defined for `n > e`.
pub fn log_over_loglog(n: f64) -> Option<f64> {
    let ll = libm::log(libm::log(n));
    (n > core::f64::consts::E && ll > 0.0).then(|| libm::log(n) / ll)
}

fn binom2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}
