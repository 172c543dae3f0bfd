//! Seeded random streams and seed derivation.
//!
//! Every draw in the crate goes through [`Rng`], a ChaCha8 generator. ChaCha8
//! is specified bit-for-bit, so a given seed yields the same sequence on every
//! platform. Child streams share the key derived from a master seed and differ
//! by the ChaCha stream number, which makes them non-overlapping.
//!
//! Seeds for independent runs are derived with [`mix_seed`]:
//!
//! ```text
//! key  = (index << 32) | replication
//! seed = fmix64(master ^ fmix64(key))
//! ```
//!
//! where `fmix64` is the SplitMix64 finaliser. `fmix64` is a bijection on
//! `u64`, so for a fixed master seed distinct `(index, replication)` pairs
//! always map to distinct seeds.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent child stream `stream` of `master`.
    pub fn child(master: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master);
        inner.set_stream(stream);
        Rng(inner)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform draw in `[lo, hi]`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    pub fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.uniform() < 0.5
    }
}

/// SplitMix64 finaliser.
pub fn fmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for replication `replication` of grid point `index` under `master`.
///
/// Both `index` and `replication` must fit in 32 bits.
pub fn mix_seed(master: u64, index: u64, replication: u64) -> u64 {
    assert!(index <= u32::MAX as u64 && replication <= u32::MAX as u64);
    let key = (index << 32) | replication;
    fmix64(master ^ fmix64(key))
}
