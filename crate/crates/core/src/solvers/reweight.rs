use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::family::Family;
use super::greedy::greedy_indices;
use crate::geom::CanonicalLine;
use crate::rng::rng_from_seed;
use crate::sepsys::refine::Refinement;
use crate::sepsys::{candidate_lines, PairId, PointSet, SeparationMode};
use crate::Result;

const RESUM_EVERY: u64 = 64;
const RESCALE_ABOVE: f64 = 1.3407807929942597e154; // 2^512
const RESCALE_STEP: i32 = 512;

/// Per-candidate weights `2^hit_count`, stored scaled by `2^-rescale`.
#[derive(Clone, Debug)]
pub struct WeightState {
    hit_count: Vec<u32>,
    scaled: Vec<f64>,
    total: f64,
    rescale: i32,
    since_resum: u64,
    prefix: Vec<f64>,
    dirty_from: usize,
}

impl WeightState {
    pub fn new(len: usize) -> WeightState {
        WeightState {
            hit_count: vec![0; len],
            scaled: vec![1.0; len],
            total: len as f64,
            rescale: 0,
            since_resum: 0,
            prefix: vec![0.0; len],
            dirty_from: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.hit_count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hit_count.is_empty()
    }

    pub fn hit_count(&self, i: usize) -> u32 {
        self.hit_count[i]
    }

    pub fn rescale_exponent(&self) -> i32 {
        self.rescale
    }

    /// Weight of `i` scaled by `2^-rescale_exponent`.
    pub fn weight(&self, i: usize) -> f64 {
        self.scaled[i]
    }

    /// Sum of scaled weights, maintained incrementally.
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn resummed_total(&self) -> f64 {
        self.scaled.iter().sum()
    }

    pub fn double(&mut self, i: usize) {
        self.hit_count[i] += 1;
        self.total += self.scaled[i];
        self.scaled[i] *= 2.0;
        self.dirty_from = self.dirty_from.min(i);
        self.since_resum += 1;
        if self.since_resum >= RESUM_EVERY {
            self.since_resum = 0;
            self.total = self.resummed_total();
        }
        if self.total > RESCALE_ABOVE {
            self.rescale += RESCALE_STEP;
            for (w, &h) in self.scaled.iter_mut().zip(&self.hit_count) {
                *w = libm::ldexp(1.0, h as i32 - self.rescale);
            }
            self.total = self.resummed_total();
            self.dirty_from = 0;
        }
    }

    fn refresh_prefix(&mut self) {
        let mut acc = if self.dirty_from == 0 { 0.0 } else { self.prefix[self.dirty_from - 1] };
        for i in self.dirty_from..self.scaled.len() {
            acc += self.scaled[i];
            self.prefix[i] = acc;
        }
        self.dirty_from = self.scaled.len();
    }

    /// Draw `m` indices with replacement, proportionally to weight.
    pub fn sample<R: Rng>(&mut self, rng: &mut R, m: usize) -> Vec<usize> {
        self.refresh_prefix();
        let top = *self.prefix.last().expect("nonempty weights");
        (0..m)
            .map(|_| {
                let u = rng.gen::<f64>() * top;
                self.prefix.partition_point(|&p| p <= u).min(self.len() - 1)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Constant in the sample size `C * (1/eps) * ln(1/eps + 2)`.
    pub epsilon_constant: f64,
    /// Rounds per guess: `ceil(c * k * ln(n + 2))`.
    pub max_rounds_constant: f64,
    /// Starting guess; `ceil(sqrt(n))` when `None`.
    pub initial_guess: Option<usize>,
    pub rng_seed: u64,
    /// Shrink the final sample to a greedy cover drawn from it.
    pub prune: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon_constant: 4.0,
            max_rounds_constant: 16.0,
            initial_guess: None,
            rng_seed: 0,
            prune: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuessRecord {
    pub k: usize,
    pub rounds: usize,
    pub succeeded: bool,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub lines: Vec<CanonicalLine>,
    pub mode: SeparationMode,
    pub rounds_used: usize,
    pub guess_history: Vec<GuessRecord>,
    pub weight_doublings: u64,
    /// Distinct lines in the separating sample before pruning.
    pub sample_size: usize,
    /// Rounds where the unseparated pair was too heavy to reweight.
    pub failed_rounds: usize,
    /// Set when the guess cap was hit and the greedy cover was returned.
    pub fallback: bool,
}

pub fn sample_size(cfg: &SolverConfig, k: usize) -> usize {
    let inv_eps = 4.0 * k as f64;
    libm::ceil(cfg.epsilon_constant * inv_eps * libm::log(inv_eps + 2.0)) as usize
}

pub fn rounds_for_guess(cfg: &SolverConfig, k: usize, n: usize) -> usize {
    libm::ceil(cfg.max_rounds_constant * k as f64 * libm::log(n as f64 + 2.0)) as usize
}

fn integer_sqrt_ceil(n: usize) -> usize {
    let mut r = libm::sqrt(n as f64) as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

fn first_unseparated(fam: &Family<'_>, sample: &[usize]) -> Option<PairId> {
    let mut r = Refinement::new(fam.ps.len());
    for &idx in sample {
        if r.is_done() {
            break;
        }
        r.split_by(|k| (fam.side(idx, k).as_i8() + 1) as u64);
    }
    r.first_pair()
}

/// Multiplicative-weights hitting set over the candidate lines.
///
/// For a guess `k` (doubling from the initial guess) each round samples an
/// eps-net candidate by weight with `eps = 1/(4k)`. A separating sample is
/// returned; otherwise the weights of all lines hitting an unseparated pair
/// are doubled when that pair is light. The result separates in relaxed
/// mode.
pub fn reweight_approx(ps: &PointSet, cfg: &SolverConfig) -> Result<SolveResult> {
    let mode = SeparationMode::Relaxed;
    let n = ps.len();
    let cands = candidate_lines(ps)?;
    let fam = Family::new(ps, &cands, mode);
    let mut rng = rng_from_seed(cfg.rng_seed);
    let mut k = cfg.initial_guess.unwrap_or_else(|| integer_sqrt_ceil(n)).max(1);
    let mut history = Vec::new();
    let mut rounds_used = 0;
    let mut doublings = 0u64;
    let mut failed_rounds = 0;
    let mut hitting: Vec<usize> = Vec::new();
    while k <= n.max(1) {
        let eps = 1.0 / (4.0 * k as f64);
        let m = sample_size(cfg, k);
        let budget = rounds_for_guess(cfg, k, n);
        let mut weights = WeightState::new(fam.len());
        for round in 1..=budget {
            rounds_used += 1;
            let mut sample = weights.sample(&mut rng, m);
            sample.sort_unstable();
            sample.dedup();
            let Some(pair) = first_unseparated(&fam, &sample) else {
                history.push(GuessRecord { k, rounds: round, succeeded: true });
                let sample_size = sample.len();
                let chosen = if cfg.prune {
                    greedy_indices(&fam, Some(&sample)).expect("the sample separates")
                } else {
                    sample
                };
                let lines: Vec<CanonicalLine> = chosen.iter().map(|&i| fam.realize(i)).collect();
                super::assert_separates(ps, &lines, mode)?;
                return Ok(SolveResult {
                    lines,
                    mode,
                    rounds_used,
                    guess_history: history,
                    weight_doublings: doublings,
                    sample_size,
                    failed_rounds,
                    fallback: false,
                });
            };
            hitting.clear();
            let mut w_pair = 0.0;
            for idx in 0..fam.len() {
                if mode.separates(fam.side(idx, pair.i), fam.side(idx, pair.j)) {
                    hitting.push(idx);
                    w_pair += weights.weight(idx);
                }
            }
            if w_pair <= eps * weights.total_weight() {
                for &idx in &hitting {
                    weights.double(idx);
                }
                doublings += hitting.len() as u64;
            } else {
                failed_rounds += 1;
            }
        }
        history.push(GuessRecord { k, rounds: budget, succeeded: false });
        k *= 2;
    }
    log::warn!("reweighting exceeded the guess cap; returning the greedy cover");
    let chosen = greedy_indices(&fam, None).expect("the full family separates any set");
    let lines: Vec<CanonicalLine> = chosen.iter().map(|&i| fam.realize(i)).collect();
    super::assert_separates(ps, &lines, mode)?;
    let sample_size = lines.len();
    Ok(SolveResult {
        lines,
        mode,
        rounds_used,
        guess_history: history,
        weight_doublings: doublings,
        sample_size,
        failed_rounds,
        fallback: true,
    })
}
