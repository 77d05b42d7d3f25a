//! Counter-based randomness for the dynamics.
//!
//! Slot `k` of a stream is a pure function of `(seed, stream id, k)`: it is
//! read from ChaCha8 keyed by the seed, with the stream id as the nonce and
//! the word position fixed at `6k`. Any slot can be re-derived without
//! replaying its predecessors.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream ids used by the library; a global seed is expanded into these.
pub mod ids {
    /// Single chains, sandwich runs and stationary runs.
    pub const DYNAMICS: u64 = 0;
    /// Configuration draws in diagnostics and transforms.
    pub const PROBES: u64 = 1;
    /// CFTP replica `i` reads stream `CFTP_BASE + i`.
    pub const CFTP_BASE: u64 = 1 << 32;
}

const WORDS_PER_SLOT: u128 = 6;
const TWO_POW_M52: f64 = 1.0 / (1u64 << 52) as f64;

/// The randomness consumed by one single-site update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub site: usize,
    /// Uniform in the open interval (0, 1).
    pub uniform: f64,
    /// Exponential holding time with rate 1.
    pub holding: f64,
}

/// Map 64 random bits to the open unit interval on the grid `(j + 1/2) 2^-52`.
#[inline]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * TWO_POW_M52
}

/// Uniform index in `0..n` by the multiply-shift map.
#[inline]
pub fn bounded_index(bits: u64, n: usize) -> usize {
    ((bits as u128 * n as u128) >> 64) as usize
}

#[derive(Debug, Clone)]
pub struct UpdateStream {
    seed: u64,
    stream: u64,
    n_sites: usize,
    rng: ChaCha8Rng,
    cursor: u64,
}

impl UpdateStream {
    pub fn new(seed: u64, stream: u64, n_sites: usize) -> Self {
        assert!(n_sites > 0, "update stream over an empty volume");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            n_sites,
            rng,
            cursor: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Index of the slot the next call to [`next_slot`](Self::next_slot) returns.
    pub fn position(&self) -> u64 {
        self.cursor
    }

    /// Random access to slot `k`.
    pub fn slot(&mut self, k: u64) -> Slot {
        self.rng.set_word_pos(k as u128 * WORDS_PER_SLOT);
        let site = bounded_index(self.rng.next_u64(), self.n_sites);
        let uniform = open_unit(self.rng.next_u64());
        let holding = -open_unit(self.rng.next_u64()).ln();
        Slot { site, uniform, holding }
    }

    pub fn next_slot(&mut self) -> Slot {
        let k = self.cursor;
        self.cursor += 1;
        self.slot(k)
    }
}

/// Independent uniforms for configuration draws, keyed like [`UpdateStream`].
#[derive(Debug, Clone)]
pub struct UniformSource {
    rng: ChaCha8Rng,
}

impl UniformSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform in (0, 1).
    pub fn next_open(&mut self) -> f64 {
        open_unit(self.rng.next_u64())
    }

    /// Uniform in `[lo, hi]`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        (lo + (hi - lo) * self.next_open()).clamp(lo, hi)
    }

    pub fn next_index(&mut self, n: usize) -> usize {
        bounded_index(self.rng.next_u64(), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_sequence() {
        let mut s1 = UpdateStream::new(9, ids::DYNAMICS, 17);
        let mut s2 = UpdateStream::new(9, ids::DYNAMICS, 17);
        for _ in 0..100 {
            assert_eq!(s1.next_slot(), s2.next_slot());
        }
    }

    #[test]
    fn random_access_matches_sequential() {
        let mut seq = UpdateStream::new(3, 5, 10);
        let slots: Vec<Slot> = (0..50).map(|_| seq.next_slot()).collect();
        let mut ra = UpdateStream::new(3, 5, 10);
        for k in (0..50).rev() {
            assert_eq!(ra.slot(k), slots[k as usize]);
        }
    }

    #[test]
    fn streams_and_seeds_differ() {
        let a = UpdateStream::new(1, 0, 1000).slot(0);
        let b = UpdateStream::new(1, 1, 1000).slot(0);
        let c = UpdateStream::new(2, 0, 1000).slot(0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn open_unit_endpoints() {
        assert!(open_unit(0) > 0.0);
        assert!(open_unit(u64::MAX) < 1.0);
        assert_eq!(bounded_index(u64::MAX, 7), 6);
        assert_eq!(bounded_index(0, 7), 0);
    }

    #[test]
    fn sites_roughly_uniform() {
        let n = 8;
        let mut s = UpdateStream::new(11, 0, n);
        let mut counts = vec![0usize; n];
        let draws = 80_000;
        let mut mean_u = 0.0;
        for _ in 0..draws {
            let slot = s.next_slot();
            counts[slot.site] += 1;
            mean_u += slot.uniform;
        }
        let expected = draws as f64 / n as f64;
        for c in counts {
            // 5 binomial standard deviations
            assert!((c as f64 - expected).abs() < 5.0 * (expected * 7.0 / 8.0).sqrt());
        }
        assert!((mean_u / draws as f64 - 0.5).abs() < 5.0 * (1.0 / 12.0 / draws as f64).sqrt());
    }
}
