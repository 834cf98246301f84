//! Seeds and reproducible stream derivation.
//!
//! Every sampler in this crate draws from a ChaCha8 stream keyed by a
//! [`Seed`]. Child seeds are derived by hashing (seed, index) with the
//! SplitMix64 finalizer, so the stream backing a given row or core depends
//! only on its own indices: drawing more rows never perturbs earlier ones.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Generator behind every sample stream; recorded in experiment output.
pub const RNG_TAG: &str = "chacha8";

/// Master seed for a sampling operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    pub fn new(value: u64) -> Self {
        Seed(value)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Derives the child seed for `index`. Stable: the result depends only on
    /// (self, index), never on how many siblings exist.
    pub fn child(self, index: u64) -> Seed {
        let mixed = self.0 ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        Seed(splitmix_finalize(mixed))
    }

    /// Fresh generator positioned at the start of this seed's stream.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn child_is_stable_and_injective_in_practice() {
        let s = Seed::new(42);
        assert_eq!(s.child(0), s.child(0));
        let children: Vec<u64> = (0..1000).map(|i| s.child(i).value()).collect();
        let mut sorted = children.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), children.len());
    }

    #[test]
    fn distinct_seeds_give_distinct_streams() {
        let mut a = Seed::new(1).rng();
        let mut b = Seed::new(2).rng();
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn same_seed_replays_the_stream() {
        let mut a = Seed::new(7).rng();
        let mut b = Seed::new(7).rng();
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
