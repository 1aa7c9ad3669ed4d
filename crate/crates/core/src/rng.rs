//! Seed plumbing shared by all randomized routines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SepRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in a study seeded with `seed`.
///
/// Trials are independent of each other and of evaluation order.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ splitmix64(trial)
}
