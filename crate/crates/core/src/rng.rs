//! Seeded random streams.
//!
//! Every consumer draws from a ChaCha20 generator keyed by the user seed and
//! a 64-bit stream id. The high 32 bits of the id name the channel, the low
//! 32 bits the coefficient index, so each coefficient owns an independent
//! substream and replay never depends on draw order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Channel tags (high 32 bits of the stream id).
pub const PRIOR_CHANNEL: u64 = 0;
pub const NOISE_X1_CHANNEL: u64 = 1;
pub const NOISE_X2_CHANNEL: u64 = 2;
pub const SAMPLER_CHANNEL: u64 = 3;

pub fn substream(seed: u64, channel: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((channel << 32) | (index & 0xffff_ffff));
    rng
}

/// SplitMix64 finalizer, used to derive child seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
