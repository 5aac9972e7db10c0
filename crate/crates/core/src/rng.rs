//! Seeded randomness. All randomized families and sampled checks draw from
//! [`seeded`] so a `(family, params, seed)` triple always rebuilds the same
//! instance.
//!
//! The generator is xoshiro256** seeded from a `u64` through SplitMix64
//! (`rand_xoshiro::Xoshiro256StarStar::seed_from_u64`). Ranges are drawn with
//! `rand`'s `gen_range`.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub type Rng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> Rng {
    Xoshiro256StarStar::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a position so that per-cell seeds stay independent.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(base), |acc, &p| {
        splitmix64(acc ^ p.wrapping_mul(0xD6E8_FEB8_6659_FD93))
    })
}
