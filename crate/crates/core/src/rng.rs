//! Deterministic seeding.
//!
//! Every trial owns its own generator whose seed is a SplitMix64 mix of the
//! master seed and the trial coordinates, so results do not depend on the
//! order in which trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One round of the SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a list of coordinates into a master seed.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

/// Generator for trial `trial` of the cell `(k, n, m)`.
pub fn trial_rng(master: u64, k: usize, n: usize, m: usize, trial: usize) -> TrialRng {
    let seed = derive_seed(master, &[k as u64, n as u64, m as u64, trial as u64]);
    TrialRng::seed_from_u64(seed)
}

pub fn seeded(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}
