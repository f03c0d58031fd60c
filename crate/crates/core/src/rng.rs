//! Deterministic, labeled random streams.
//!
//! A run has one root seed. Every consumer of randomness gets its own stream
//! derived from `(seed, label)`, so adding draws in one component never shifts
//! the numbers another component sees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Labels used by the training loop.
pub mod labels {
    pub const RESET: &str = "reset";
    pub const POLICY: &str = "policy-sampling";
    pub const COINS: &str = "sampler-coins";
    pub const CRITIC: &str = "critic";
    pub const NOISE: &str = "noise";
    pub const EVAL_RESET: &str = "eval-reset";
    pub const EVAL_POLICY: &str = "eval-policy-sampling";
    pub const EVAL_NOISE: &str = "eval-noise";
}

/// FNV-1a, used to turn a label into a ChaCha stream id.
fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(label_hash(label));
        RngStream {
            seed,
            label: label.to_owned(),
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw in `[low, high)`.
    pub fn uniform_in(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    /// Returns `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

/// The fixed set of streams a training run draws from.
#[derive(Clone, Debug)]
pub struct Streams {
    pub reset: RngStream,
    pub policy: RngStream,
    pub coins: RngStream,
    pub critic: RngStream,
    pub noise: RngStream,
    pub eval_reset: RngStream,
    pub eval_policy: RngStream,
    pub eval_noise: RngStream,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Streams {
            reset: RngStream::new(seed, labels::RESET),
            policy: RngStream::new(seed, labels::POLICY),
            coins: RngStream::new(seed, labels::COINS),
            critic: RngStream::new(seed, labels::CRITIC),
            noise: RngStream::new(seed, labels::NOISE),
            eval_reset: RngStream::new(seed, labels::EVAL_RESET),
            eval_policy: RngStream::new(seed, labels::EVAL_POLICY),
            eval_noise: RngStream::new(seed, labels::EVAL_NOISE),
        }
    }
}
