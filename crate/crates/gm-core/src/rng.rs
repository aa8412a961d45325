//! Seeded randomness for instance generation.
//!
//! Everything random in this crate flows through `SplitMix64` (the
//! finalizer of Java's SplittableRandom: a counter advanced by the golden
//! ratio, hashed through a murmur-style avalanche). The generator is
//! pinned here, constant for the life of the file formats, so that
//! instances can be regenerated bit-for-bit from `(parameters, seed)` on
//! any platform and reimplemented in other languages from this comment
//! alone.
//!
//! Sub-streams: a consumer never draws from the raw seed. Each concern
//! derives its own independent stream with [`SplitMix64::stream`], keyed
//! by one of the `STREAM_*` tags below, so adding draws to one concern
//! cannot shift another.

/// Point coordinate generation.
pub const STREAM_POINTS: u64 = 1;
/// Ground-truth permutation sampling.
pub const STREAM_PERMUTATION: u64 = 2;
/// Noise edge selection and epsilon draws.
pub const STREAM_NOISE: u64 = 3;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplittableRandom's 64-bit finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive combination of words into one 64-bit value, used to
/// derive per-trial seeds: `h_0 = GOLDEN`, `h_{k+1} = mix64(h_k + mix64(p_k))`.
pub fn hash64(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(GOLDEN, |h, &p| mix64(h.wrapping_add(mix64(p))))
}

/// Counter-based generator: `state += GOLDEN; output = mix64(state)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent sub-stream of `seed`, selected by `tag`:
    /// `state = mix64(seed + mix64(tag))`.
    pub fn stream(seed: u64, tag: u64) -> Self {
        SplitMix64 {
            state: mix64(seed.wrapping_add(mix64(tag))),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)`, unbiased by rejection.
    pub fn next_range(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_range bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Uniform permutation of `0..n` by the Fisher-Yates shuffle
    /// (descending index, `j = next_range(i + 1)`).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.next_range(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        perm
    }
}
