//! Seed derivation for reproducible, order-independent parallel runs.
//!
//! Every replicate owns a generator seeded from `(master, condition, index)`,
//! so the draw for a replicate never depends on which worker ran it or in
//! which order replicates were scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used by every simulation and sampler in the crate.
pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines an ordered list of words into one 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5eed_cf9a_0000_0001, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Seed for replicate `k` of condition `condition` under `master`.
pub fn replicate_seed(master: u64, condition: u64, k: u64) -> u64 {
    derive_seed(&[master, condition, k])
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// FNV-1a over a byte string; used to turn condition labels into stable ids.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
