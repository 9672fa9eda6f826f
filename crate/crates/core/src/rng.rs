//! Seeded random streams.
//!
//! Every random draw in a simulation comes from a ChaCha8 stream addressed by
//! a root seed plus a path of stream indices (trial, step, ...). Addresses are
//! mixed with SplitMix64 so neighbouring indices give unrelated streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a stream index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// A generator for the stream at `path` below `seed`.
pub fn stream(seed: u64, path: &[u64]) -> SimRng {
    let key = path.iter().fold(seed, |acc, &i| derive_seed(acc, i));
    SimRng::seed_from_u64(key)
}
