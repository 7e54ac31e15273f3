//! Seeded random streams.
//!
//! Every random draw in the crate goes through [`stream`], keyed by the
//! configuration seed, a purpose tag and an index, so parallel work produces
//! the same numbers regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed ^ splitmix(tag)) ^ index))
}

/// Uniform point on the sphere of the given radius.
pub fn sphere_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a * radius / norm).collect();
        }
    }
}

/// Uniform point in the ball of the given radius.
pub fn ball_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
    sphere_point(rng, n, r)
}

pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub mod tags {
    pub const STAR_FORM: u64 = 1;
    pub const INFIMUM: u64 = 2;
    pub const DISTANCE: u64 = 3;
    pub const V1: u64 = 4;
    pub const FEDORYUK: u64 = 5;
    pub const NONDEGEN: u64 = 6;
    pub const CLOUD: u64 = 7;
    pub const TARGETED: u64 = 8;
}
