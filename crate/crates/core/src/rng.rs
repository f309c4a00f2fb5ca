//! Deterministic random number generation for reproducible permutation search.
//!
//! Certificates must be reproducible across machines and runs, so the
//! generator is pinned here rather than borrowed from a library whose
//! algorithm may change between versions:
//!
//! * stream: SplitMix64 (Steele, Lea & Flood's `splitmix64` finalizer over a
//!   counter advanced by the golden-ratio increment);
//! * bounded draws: rejection sampling, discarding the low `2^64 mod bound`
//!   values so `r % bound` is exactly uniform;
//! * shuffling: Fisher-Yates from the last position down.

/// Increment used by the SplitMix64 counter (2^64 / golden ratio, odd).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator. Same seed, same platform-independent stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, bound)`, unbiased via rejection sampling.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        // 2^64 mod bound values would be over-represented by a plain modulo;
        // reject raw draws below that threshold.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Per-subset seed used by sweeps: mixes the sweep seed with the subset's
/// rank in the canonical enumeration, so reruns and re-partitioned parallel
/// runs draw identical permutation streams for each subset.
pub fn derive_subset_seed(base: u64, rank: u64) -> u64 {
    SplitMix64::new(base ^ rank.wrapping_mul(GOLDEN_GAMMA)).next_u64()
}
