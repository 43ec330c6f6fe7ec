//! Seeded, splittable randomness.
//!
//! All stochastic sampling in the crate derives from one base seed. Ensemble
//! member `i` gets its own generator keyed by `(seed, i)`, so results do not
//! depend on how members are distributed over workers.

use rand::rngs::StdRng;
use rand::SeedableRng;

/// Generator for ensemble member `index` under `seed`.
pub fn member_rng(seed: u64, index: u64) -> StdRng {
    // splitmix64-style index scramble keeps member streams decorrelated
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    StdRng::seed_from_u64(z)
}
