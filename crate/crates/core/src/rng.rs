//! Deterministic random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream whose key
//! is derived from a user seed and a path of integers (replication, subsample
//! ordinal, purpose tag, ...). Parallel work therefore never shares a stream
//! and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used when deriving seeds for distinct purposes.
pub mod tag {
    pub const SUBSAMPLE: u64 = 0x5355_4253;
    pub const DENSITY: u64 = 0x4445_4e53;
    pub const PILOT: u64 = 0x5049_4c4f;
    pub const CHAIN: u64 = 0x4348_4149;
    pub const LIMIT: u64 = 0x4c49_4d49;
    pub const DGP: u64 = 0x4447_5030;
    pub const METHOD: u64 = 0x4d45_5448;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `path` into `seed`, producing a well-mixed child seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// A generator for the stream identified by `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
