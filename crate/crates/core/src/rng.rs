//! Fixed deterministic PRNG.
//!
//! All seeded operations in this crate draw from SplitMix64 (Steele et al.,
//! "Fast splittable pseudorandom number generators"). The algorithm is pinned
//! here rather than taken from an external crate so that seeded results are
//! bit-identical across platforms and dependency upgrades.

/// SplitMix64 generator. One `u64` of state, one output per step.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`. Rejection sampling, so no modulo bias.
    /// Panics if `n == 0`.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// In-place Fisher-Yates shuffle, iterating from the end.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Derives an independent sub-seed from a master seed and a stream index.
    /// Used where one seed parameter fans out into several runs (e.g. one
    /// training round per held-out edge).
    pub fn derive(master: u64, stream: u64) -> u64 {
        let mut g = SplitMix64::new(master ^ stream.wrapping_mul(0xA076_1D64_78BD_642F));
        g.next_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sequence() {
        // First three outputs for seed 1234567, from the published reference
        // implementation.
        let mut g = SplitMix64::new(1234567);
        assert_eq!(g.next_u64(), 6457827717110365317);
        assert_eq!(g.next_u64(), 3203168211198807973);
        assert_eq!(g.next_u64(), 9817491932198370423);
    }

    #[test]
    fn next_below_in_range() {
        let mut g = SplitMix64::new(42);
        for _ in 0..1000 {
            assert!(g.next_below(7) < 7);
        }
    }

    #[test]
    fn shuffle_is_permutation_and_deterministic() {
        let mut a: Vec<u32> = (0..50).collect();
        let mut b: Vec<u32> = (0..50).collect();
        SplitMix64::new(9).shuffle(&mut a);
        SplitMix64::new(9).shuffle(&mut b);
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn derive_differs_per_stream() {
        assert_ne!(SplitMix64::derive(42, 0), SplitMix64::derive(42, 1));
    }
}
