//! Seeded randomness.
//!
//! Every random decision in the crate draws from a [`Xoshiro256PlusPlus`]
//! generator whose seed is derived from a master seed with a SplitMix64
//! chain. Nothing reads from OS entropy or thread-local generators.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use sha2::{Digest, Sha256};

pub type SeededRng = Xoshiro256PlusPlus;

/// Mixes `parts` into `master` one SplitMix64 step at a time.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = SplitMix64::seed_from_u64(master).next_u64();
    for &p in parts {
        state = SplitMix64::seed_from_u64(state ^ p).next_u64();
    }
    state
}

/// Stable 64-bit key for a string label (first 8 bytes of its SHA-256).
pub fn str_key(s: &str) -> u64 {
    let digest = Sha256::digest(s.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from(master: u64, parts: &[u64]) -> SeededRng {
    SeededRng::seed_from_u64(derive_seed(master, parts))
}
