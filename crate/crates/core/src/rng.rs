//! Seed derivation.
//!
//! Every random stream is a `ChaCha8Rng` seeded from a 64-bit value derived
//! from the run seed, a stream tag and an index. Stream `i` therefore does not
//! depend on how many other streams were drawn or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used by the library.
pub mod tag {
    pub const PERMUTATION: u64 = 0x7065_726d;
    pub const REPLICATE: u64 = 0x7265_706c;
    pub const THINNING: u64 = 0x7468_696e;
    pub const MARKS: u64 = 0x6d61_726b;
    pub const NULL_MARKS: u64 = 0x6e75_6c6c;
    pub const FIELD: u64 = 0x6669_656c;
    pub const POINTS: u64 = 0x706f_696e;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix(splitmix(seed ^ tag) + index)`.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ tag).wrapping_add(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(seed, tag, index))
}
