//! Deterministic random number generation.
//!
//! Every stochastic operation in this crate draws from a ChaCha12 generator
//! seeded from a caller-supplied 64-bit seed. Independent sub-streams are
//! obtained through ChaCha's stream counter, so parallel consumers (bootstrap
//! iterations, benchmark repetitions, Monte Carlo batches) get reproducible
//! results that do not depend on scheduling. Normal deviates come from
//! Box-Muller over the raw ChaCha output; platform samplers are never used.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Named sub-stream purposes, kept distinct so that unrelated consumers of the
/// same seed never share a stream.
pub mod purpose {
    pub const SUBSETS: u64 = 1;
    pub const VALIDATION: u64 = 2;
    pub const BOOTSTRAP_BASE: u64 = 3;
    pub const TEST_SUBSET: u64 = 4;
    pub const GAUSSIAN: u64 = 5;
    pub const SPLIT: u64 = 6;
    pub const MC_P: u64 = 7;
    pub const MC_Q: u64 = 8;
    pub const TRIALS_NULL: u64 = 9;
    pub const TRIALS_ALT: u64 = 10;
}

/// A ChaCha12 generator on stream `stream` of the keyspace derived from `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a tag into a seed (SplitMix64 finalizer), for deriving per-repetition
/// or per-dimension child seeds from one master seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `(0, 1]`, safe as a logarithm argument.
fn uniform_open_zero(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, n)` by rejection, bias-free.
pub fn index(rng: &mut ChaCha12Rng, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as u64;
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

/// `count` distinct indices out of `[0, n)`, drawn uniformly without
/// replacement via partial Fisher-Yates. Order of the result is the draw order.
pub fn indices_without_replacement(rng: &mut ChaCha12Rng, n: usize, count: usize) -> Vec<usize> {
    debug_assert!(count <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = i + index(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

/// Standard normal source: Box-Muller over ChaCha output, caching the spare
/// deviate of each pair.
pub struct NormalSource {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(rng: ChaCha12Rng) -> Self {
        Self { rng, spare: None }
    }

    pub fn from_seed(seed: u64, stream_id: u64) -> Self {
        Self::new(stream(seed, stream_id))
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = uniform_open_zero(&mut self.rng);
        let u2 = uniform(&mut self.rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
