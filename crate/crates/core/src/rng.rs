//! Counter-based random streams.
//!
//! Every random draw in the simulator is addressed by `(seed, domain, key,
//! counter)`: a ChaCha8 generator keyed by the seed and domain, positioned
//! on stream `key` at block offset `counter`. Draws therefore do not depend
//! on iteration order or on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains. Distinct domains never share keystream.
pub mod domain {
    pub const INFECTION: u64 = 0x01;
    pub const SEEDING: u64 = 0x02;
    pub const ELIGIBILITY: u64 = 0x03;
    pub const RIDERS: u64 = 0x04;
    pub const SYNTHETIC: u64 = 0x05;
    pub const REPLICATE: u64 = 0x06;
    pub const CALIBRATION: u64 = 0x07;
    pub const INDEX_CASE: u64 = 0x08;
    pub const PERCOLATION: u64 = 0x09;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for `(domain, index)` from a master seed.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ domain.rotate_left(40)) ^ index)
}

/// Returns the generator for `(seed, domain, key, counter)`.
pub fn stream(seed: u64, domain: u64, key: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ domain.rotate_left(40)));
    rng.set_stream(key);
    // 2^20 words per counter value is far more than any single draw site uses.
    rng.set_word_pos(u128::from(counter) << 20);
    rng
}
