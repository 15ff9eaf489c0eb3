//! Named seed derivation.
//!
//! All randomness flows from one master seed. Each stage and each work unit
//! derives its own stream from `(master, names...)`, so per-unit results do
//! not depend on processing order or worker count, and partial re-runs of a
//! stage reproduce the full run's choices.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a child seed from a master seed and a path of names.
pub fn derive_seed(master: u64, names: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for name in names {
        hasher.update([0u8]);
        hasher.update(name.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 is at least 8 bytes"))
}

/// Deterministic RNG for a named work unit.
pub fn rng_for(master: u64, names: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, names))
}
