//! Seeded RNG streams.
//!
//! Every random choice in the library flows from a caller-supplied `u64`
//! seed. Independent streams are derived per (seed, label) so that work
//! items (samples, folds, repetitions) can run in any order, or in
//! parallel, and still reproduce bit-identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8], basis: u64) -> u64 {
    let mut h = basis;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive a child seed from a master seed and a label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = fnv1a(&seed.to_le_bytes(), FNV_OFFSET);
    h = fnv1a(label.as_bytes(), h);
    h
}

/// A deterministic RNG stream for (seed, label).
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let a = derive_seed(seed, label);
    let b = fnv1a(label.as_bytes(), a ^ 0x9e37_79b9_7f4a_7c15);
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&a.to_le_bytes());
    key[16..24].copy_from_slice(&b.to_le_bytes());
    key[24..32].copy_from_slice(&a.rotate_left(32).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
