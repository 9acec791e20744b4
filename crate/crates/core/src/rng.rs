//! Seed derivation and keyed random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream whose 256-bit
//! key is the SHA-256 digest of a 64-bit seed and a purpose tag. Streams are
//! therefore independent of execution order and identical across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Random stream for `(seed, tag)`.
pub fn stream(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tag.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Child seed keyed by `(parent, parts...)`.
pub fn derive_seed(parent: u64, parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(parent.to_le_bytes());
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(b)
}
