//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! a counter-based stream cipher generator. A stream is addressed by a 64-bit
//! seed plus a short path of 64-bit labels; the path is folded into a 256-bit
//! ChaCha key with SplitMix64 so that sibling streams are independent and a
//! given address always yields the same sequence on every platform.
//!
//! Dropout masks for training example `j` of update `t` come from
//! `stream(seed, &[DROPOUT, t, j])`, so a batch may be evaluated in any order
//! (or in parallel) without changing the masks. Epoch shuffles come from
//! `stream(shuffle_seed, &[SHUFFLE, epoch])`. The only cursor a resumed run
//! needs is therefore the `(epoch, update)` pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub const DROPOUT: u64 = 0x6472_6f70;
pub const SHUFFLE: u64 = 0x7368_7566;
pub const INIT: u64 = 0x696e_6974;
pub const SPLIT: u64 = 0x7370_6c74;
pub const SYNTH: u64 = 0x7379_6e74;
pub const ORACLE: u64 = 0x6f72_636c;
pub const BASELINE: u64 = 0x6261_7365;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the generator for `seed` at `path`.
pub fn stream(seed: u64, path: &[u64]) -> Stream {
    let mut state = mix64(seed);
    for &label in path {
        state = mix64(state ^ mix64(label));
    }
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        state = mix64(state.wrapping_add(i as u64));
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
