//! Reproducibility contract for every randomized routine.
//!
//! Generator: ChaCha12 (`rand_chacha::ChaCha12Rng`), a counter-based stream
//! cipher RNG with a stable, portable output sequence. Every output that
//! involved randomness records [`PRNG_ID`] so cross-version drift is
//! detectable.
//!
//! Stream split rule: independent stream `k` of base seed `s` is seeded with
//! `splitmix64(s.wrapping_add(k))`. SplitMix64 is a fixed public mixing
//! function, so the rule is reproducible from the documentation alone.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Identifier of the generator + split rule, embedded in generated files.
pub const PRNG_ID: &str = "chacha12-splitmix64";

/// SplitMix64 mixing step (Steele, Lea, Flood 2014).
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Seed for independent stream `stream` derived from `base`.
pub fn derive_stream(base: u64, stream: u64) -> u64 {
    splitmix64(base.wrapping_add(stream))
}

/// The project-wide RNG for a (base seed, stream) pair.
pub fn rng_for(base: u64, stream: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_stream(base, stream))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_deterministic() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(7, 1).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(rng_for(7, 1).next_u64(), rng_for(7, 2).next_u64());
        assert_ne!(rng_for(7, 1).next_u64(), rng_for(8, 1).next_u64());
    }

    #[test]
    fn splitmix_reference_values() {
        // First output of the published SplitMix64 sequence for seed 0.
        assert_eq!(splitmix64(0), 0xE220A8397B1DCDAF);
    }
}
