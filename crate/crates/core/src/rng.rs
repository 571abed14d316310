//! Seeded random streams.
//!
//! A single user seed is expanded into independent named streams so that every
//! stage of a pipeline (sampling, noise, grouping, bootstrap) can be reproduced
//! on its own.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator used everywhere in the crate.
pub type StreamRng = Xoshiro256PlusPlus;

/// Generator seeded directly from `seed`.
pub fn seeded(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

/// Independent stream for `(seed, stage, index)`.
pub fn stream(seed: u64, stage: &str, index: u64) -> StreamRng {
    let mut h = splitmix64(seed ^ fnv1a(stage.as_bytes()));
    h = splitmix64(h ^ splitmix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    StreamRng::seed_from_u64(h)
}

/// First word of `stream(seed, stage, index)`, for seeding a sub-task.
pub fn stream_seed(seed: u64, stage: &str, index: u64) -> u64 {
    stream(seed, stage, index).next_u64()
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
