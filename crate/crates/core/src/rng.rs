//! Seeded random streams.
//!
//! All randomness goes through ChaCha8 (`rand_chacha`), whose output is fixed
//! across platforms. Independent consumers (trees of a forest, for instance)
//! use the same key with distinct stream ids, so their draws never depend on
//! execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// In-place Fisher-Yates shuffle.
pub(crate) fn shuffle<T, R: Rng>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
