//! Seed derivation for reproducible, worker-count-independent sampling.
//!
//! Every stochastic component owns an rng stream derived from a master seed
//! and a fixed set of numeric tags. Streams never depend on hash-map order,
//! thread scheduling, or platform hashers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, stable across platforms.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine a master seed with numeric tags into one derived seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix(master);
    for &tag in tags {
        state = splitmix(state ^ tag.wrapping_mul(0xa076_1d64_78bd_642f));
    }
    state
}

/// Stream rng for one unit of work (a sample, a rounding, a shuffle).
pub fn stream_rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}

/// Fixed tags naming the independent stream families.
pub mod tag {
    pub const LIVE_EDGE: u64 = 1;
    pub const GRADIENT: u64 = 2;
    pub const ROUNDING: u64 = 3;
    pub const EVALUATION: u64 = 4;
    pub const BASELINE: u64 = 5;
    pub const SYNTHETIC: u64 = 6;
    pub const SET_HASH: u64 = 7;
}
