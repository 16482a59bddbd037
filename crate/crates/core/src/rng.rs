//! Seeded randomness.
//!
//! Every random stream is addressed by a `(seed, stream)` pair, so work split
//! across threads draws exactly the numbers a serial run would.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seed used by every entry point when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_c0ffee;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(stream.wrapping_add(0xa076_1d64_78bd_642f)))
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

/// Fills `out` with independent standard normal draws.
pub fn fill_gaussian<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for x in out.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

/// A fresh standard Gaussian vector of length `d`.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut g = vec![0.0; d];
    fill_gaussian(rng, &mut g);
    g
}

/// A uniformly distributed point on the unit sphere in `R^d`.
///
/// Zero-norm draws are resampled.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    loop {
        fill_gaussian(rng, &mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 && norm.is_finite() {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}
