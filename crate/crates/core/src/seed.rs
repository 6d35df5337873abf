//! Reproducible randomness.
//!
//! Every randomized routine takes a 64-bit seed and draws from ChaCha8. Rounds,
//! blocks and trials that need independent streams get a sub-seed from
//! [`derive`], so results do not depend on how work is scheduled.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Name recorded in provenance metadata for the sub-seed mixer.
pub const MIXER: &str = "splitmix64(seed + t * 0x9e3779b97f4a7c15)";

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for stream `t` of `seed`.
pub fn derive(seed: u64, t: u64) -> u64 {
    splitmix64(seed.wrapping_add(t.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian with independent real and imaginary parts.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}
