//! Counter-based random streams.
//!
//! Every random number used by the simulation is a pure function of a key
//! tuple (seed, purpose, realization, step, node, slot). Draws therefore do
//! not depend on evaluation order, which makes the synchronous update and the
//! ensemble reduction independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Purpose tags separating the independent streams of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Graph = 1,
    Seeding = 2,
    Dynamics = 3,
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a seed together with a sequence of counters into a new 64-bit key.
#[inline]
pub fn derive(seed: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    for &p in parts {
        h = mix64(h ^ mix64(p.wrapping_add(GOLDEN)));
    }
    h
}

/// Maps 64 random bits to a uniform double in [0, 1).
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed for the stream of `purpose` within realization `index` of an ensemble.
pub fn stream_seed(base_seed: u64, index: u64, purpose: Purpose) -> u64 {
    derive(base_seed, &[index, purpose as u64])
}

/// A conventional sequential generator for one purpose stream.
pub fn sequential(base_seed: u64, index: u64, purpose: Purpose) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(base_seed, index, purpose))
}

/// Per-node draws for one synchronous step, keyed by (stream, t, node key).
#[derive(Debug, Clone, Copy)]
pub struct StepDraws {
    key: u64,
}

impl StepDraws {
    #[inline]
    pub fn new(stream: u64, t: u64, node_key: u64) -> Self {
        Self {
            key: mix64(mix64(stream ^ mix64(t.wrapping_add(GOLDEN))) ^ node_key.wrapping_mul(GOLDEN)),
        }
    }

    /// Uniform draw in [0, 1) for event slot `slot`.
    #[inline]
    pub fn uniform(&self, slot: u64) -> f64 {
        unit_f64(mix64(self.key ^ slot.wrapping_mul(0xd6e8_feb8_6659_fd93).wrapping_add(1)))
    }

    /// Uniform index in `0..n` for event slot `slot`; `n` must be positive.
    #[inline]
    pub fn index(&self, slot: u64, n: usize) -> usize {
        ((self.uniform(slot) * n as f64) as usize).min(n - 1)
    }
}
