//! Named seed derivation.
//!
//! Every random stream in the crate is derived from one master seed plus a
//! path of labels and indices, so any phase (and any individual evaluation)
//! can be replayed in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream type used throughout the crate.
pub type Rng = ChaCha8Rng;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn mix(state: u64, word: u64) -> u64 {
    splitmix(state ^ splitmix(word))
}

/// Derive a child seed from `master` and a textual label.
pub fn derive(master: u64, label: &str) -> u64 {
    // FNV-1a over the label, then mixed into the master seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    mix(master, h)
}

/// Derive a child seed from `master` and an index (run, worker, individual).
pub fn derive_index(master: u64, index: u64) -> u64 {
    mix(master, index.wrapping_add(0x5851_F42D_4C95_7F2D))
}

/// Hash a real vector bit-exactly. Used to key per-evaluation seeds on the
/// genome so results do not depend on evaluation order.
pub fn hash_values(values: &[f64]) -> u64 {
    values
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, v| mix(acc, v.to_bits()))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
