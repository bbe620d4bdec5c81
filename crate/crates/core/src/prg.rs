//! Fast keyed pseudorandom streams for simulated-transfer masking.
//!
//! The oblivious-transfer simulation masks payloads with a stream derived
//! from the session's shared seed and a per-transfer counter; both parties
//! derive the same stream. This is a statistical mixer (splitmix64), not a
//! cryptographic PRF — fine for the simulation, whose goal is exact message
//! sizes and correct share distributions, not confidentiality (the crate
//! docs spell this out). Session-private randomness uses ChaCha elsewhere.

use crate::ring::mask;

/// The splitmix64 finalizer: a fast, well-mixed u64 -> u64 permutation.
#[inline]
#[must_use]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic word stream keyed by `(key, nonce)`.
pub struct Prg {
    state: u64,
}

impl Prg {
    #[must_use]
    pub fn new(key: u64, nonce: u64) -> Prg {
        Prg { state: splitmix64(key ^ splitmix64(nonce)) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        splitmix64(self.state)
    }

    /// Next `width` pseudorandom bits.
    #[inline]
    pub fn next_bits(&mut self, width: u32) -> u64 {
        self.next_u64() & mask(width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_keyed() {
        let take = |key, nonce| {
            let mut p = Prg::new(key, nonce);
            (0..4).map(|_| p.next_u64()).collect::<Vec<_>>()
        };
        assert_eq!(take(1, 2), take(1, 2));
        assert_ne!(take(1, 2), take(1, 3));
        assert_ne!(take(1, 2), take(2, 2));
    }

    #[test]
    fn bit_truncation() {
        let mut p = Prg::new(7, 7);
        for _ in 0..100 {
            assert!(p.next_bits(5) < 32);
        }
    }
}
