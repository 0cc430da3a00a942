//! Seed derivation so that every source of randomness hangs off one root seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes a base seed with a sequence of stream tags into a new seed.
///
/// SplitMix64 finalizer applied per tag; cheap, stateless, and stable across
/// platforms, which keeps every pipeline stage reproducible from one root
/// seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut s = base ^ 0x9e37_79b9_7f4a_7c15;
    for &t in tags {
        s = s.wrapping_add(t).wrapping_add(0x9e37_79b9_7f4a_7c15);
        s = splitmix(s);
    }
    splitmix(s)
}

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded RNG for a derived stream.
pub fn rng_for(base: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags))
}
