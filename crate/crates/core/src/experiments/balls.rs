use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::{binom2, ci99, log_over_loglog, mean_sd};
use crate::rng::{rng_from_seed, trial_seed};
use crate::{Error, Result};

/// Occupancy statistics of one throw of `n_balls` balls into `n_bins` bins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallsBinsStats {
    pub n_balls: u64,
    pub n_bins: u64,
    /// `heavy[i - 2]` is the number of `i`-heavy balls (balls whose bin
    /// holds at least `i` balls), for `i` in 2..=4.
    pub heavy: [u64; 3],
    pub bins_ge2: u64,
    /// Sum over bins of `C(occupancy, 2)`.
    pub colliding_pairs: u64,
    pub max_occupancy: u64,
}

impl BallsBinsStats {
    /// Number of `i`-heavy balls, `i` in 2..=4.
    pub fn l(&self, i: usize) -> u64 {
        self.heavy[i - 2]
    }

    /// Statistics of the given bin labels (reordered in place).
    pub fn from_labels(n_bins: u64, labels: &mut [u64]) -> BallsBinsStats {
        labels.sort_unstable();
        let mut s = BallsBinsStats {
            n_balls: labels.len() as u64,
            n_bins,
            heavy: [0; 3],
            bins_ge2: 0,
            colliding_pairs: 0,
            max_occupancy: 0,
        };
        for run in labels.chunk_by(|a, b| a == b) {
            let occ = run.len() as u64;
            s.max_occupancy = s.max_occupancy.max(occ);
            s.colliding_pairs += binom2(occ);
            for i in 2..=4 {
                if occ >= i {
                    s.heavy[i as usize - 2] += occ;
                }
            }
            if occ >= 2 {
                s.bins_ge2 += 1;
            }
        }
        s
    }
}

/// Throw `n_balls` balls independently and uniformly into `n_bins` bins.
/// Only occupied bins are ever stored.
pub fn throw_balls(n_balls: u64, n_bins: u64, seed: u64) -> BallsBinsStats {
    assert!(n_bins >= 1, "need at least one bin");
    let mut rng = rng_from_seed(seed);
    let mut labels: Vec<u64> = (0..n_balls).map(|_| rng.gen_range(0..n_bins)).collect();
    BallsBinsStats::from_labels(n_bins, &mut labels)
}

/// Upper-bound factor of the heavy-ball bracket: `6 e^(i-1)`.
pub fn heavy_bound_factor(i: usize) -> f64 {
    6.0 * libm::exp(i as f64 - 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeavyBallReport {
    pub n_balls: u64,
    pub n_bins: u64,
    pub i: usize,
    pub trials: usize,
    /// `n (n / (i b))^(i-1)`.
    pub f_i: f64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `e^-2 F_i`.
    pub lower_bound: f64,
    /// `6 e^(i-1) F_i`.
    pub upper_bound: f64,
    /// Whether the 99% interval lies inside the bracket; `None` when there
    /// are no balls.
    pub verdict: Option<bool>,
}

/// Compare observed counts of `i`-heavy balls with the bracket
/// `[e^-2 F_i, 6 e^(i-1) F_i]`.
pub fn heavy_ball_report(n_balls: u64, n_bins: u64, i: usize, samples: &[u64]) -> Result<HeavyBallReport> {
    if !(2..=4).contains(&i) {
        return Err(Error::Precondition(format!("i must be 2, 3 or 4, got {i}")));
    }
    if n_bins < 3 * n_balls {
        return Err(Error::Precondition(format!("need at least 3 bins per ball, got {n_bins} bins for {n_balls} balls")));
    }
    let n = n_balls as f64;
    let f_i = n * libm::pow(n / (i as f64 * n_bins as f64), i as f64 - 1.0);
    let xs: Vec<f64> = samples.iter().map(|&v| v as f64).collect();
    let (mean, _) = mean_sd(&xs);
    let (ci_low, ci_high) = ci99(&xs);
    let lower_bound = libm::exp(-2.0) * f_i;
    let upper_bound = heavy_bound_factor(i) * f_i;
    let verdict = (n_balls > 0).then(|| lower_bound <= ci_low && ci_high <= upper_bound);
    Ok(HeavyBallReport {
        n_balls,
        n_bins,
        i,
        trials: samples.len(),
        f_i,
        mean,
        ci_low,
        ci_high,
        lower_bound,
        upper_bound,
        verdict,
    })
}

/// Run `trials` throws and report on `L_i`.
pub fn heavy_ball_bounds_check(n_balls: u64, n_bins: u64, i: usize, trials: usize, seed: u64) -> Result<HeavyBallReport> {
    // Validate before spending time on the throws.
    heavy_ball_report(n_balls, n_bins, i, &[])?;
    let samples: Vec<u64> =
        (0..trials as u64).map(|t| throw_balls(n_balls, n_bins, trial_seed(seed, t)).l(i)).collect();
    heavy_ball_report(n_balls, n_bins, i, &samples)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirthdayReport {
    pub n_balls: u64,
    pub n_bins: u64,
    pub trials: usize,
    pub max_bins_ge2: u64,
    pub mean_bins_ge2: f64,
    pub max_colliding_pairs: u64,
    pub mean_colliding_pairs: f64,
    /// `ln n / ln ln n`, when `n > e`.
    pub scale: Option<f64>,
    /// `max_bins_ge2 / scale`.
    pub ratio: Option<f64>,
}

/// Bins for the birthday experiment: `ceil(c n^2)`.
pub fn birthday_bins(n_balls: u64, c: f64) -> u64 {
    let b = libm::ceil(c * n_balls as f64 * n_balls as f64);
    (b as u64).max(1)
}

pub fn birthday_report(n_balls: u64, n_bins: u64, stats: &[BallsBinsStats]) -> BirthdayReport {
    let ge2: Vec<f64> = stats.iter().map(|s| s.bins_ge2 as f64).collect();
    let cp: Vec<f64> = stats.iter().map(|s| s.colliding_pairs as f64).collect();
    let max_bins_ge2 = stats.iter().map(|s| s.bins_ge2).max().unwrap_or(0);
    let scale = log_over_loglog(n_balls as f64);
    BirthdayReport {
        n_balls,
        n_bins,
        trials: stats.len(),
        max_bins_ge2,
        mean_bins_ge2: mean_sd(&ge2).0,
        max_colliding_pairs: stats.iter().map(|s| s.colliding_pairs).max().unwrap_or(0),
        mean_colliding_pairs: mean_sd(&cp).0,
        scale,
        ratio: scale.map(|s| max_bins_ge2 as f64 / s),
    }
}

/// Throw `n` balls into `ceil(c n^2)` bins `trials` times.
pub fn birthday_max_check(n_balls: u64, c: f64, trials: usize, seed: u64) -> Result<BirthdayReport> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    let bins = birthday_bins(n_balls, c);
    let stats: Vec<BallsBinsStats> = (0..trials as u64).map(|t| throw_balls(n_balls, bins, trial_seed(seed, t))).collect();
    Ok(birthday_report(n_balls, bins, &stats))
}
