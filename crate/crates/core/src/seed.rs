//! Seed derivation and the crate's single RNG type.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SwarmRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SwarmRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of indices into a base seed. Order-sensitive, so
/// `(x, y, trial)` and `(y, x, trial)` give different streams.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p)))
}
