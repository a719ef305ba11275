//! Seed derivation for schedule-independent randomness.
//!
//! Every replicate, repetition, and grid point gets its own ChaCha stream
//! derived from `(seed, index)`, so parallel execution order never changes
//! results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Mixes an index into a base seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for lane `lane` under a common seed.
///
/// Uses the ChaCha stream counter, so any number of lanes can be drawn from
/// one seed without overlap.
pub fn replicate_rng(seed: u64, lane: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(lane.wrapping_add(1));
    rng
}
