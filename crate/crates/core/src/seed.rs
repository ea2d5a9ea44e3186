//! Seed derivation.
//!
//! Every independent unit of work (an evaluation episode, a grid point, a
//! stability sample) draws from its own stream whose seed is a stable hash of
//! the root seed, a component label and the item index. Results therefore do
//! not depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Random source used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stable child seed for `(root, label, index)`.
pub fn derive_seed(root: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn child_rng(root: u64, label: &str, index: u64) -> SimRng {
    rng_from_seed(derive_seed(root, label, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        assert_eq!(derive_seed(7, "episode", 3), derive_seed(7, "episode", 3));
        assert_ne!(derive_seed(7, "episode", 3), derive_seed(7, "episode", 4));
        assert_ne!(derive_seed(7, "episode", 3), derive_seed(7, "grid", 3));
        assert_ne!(derive_seed(7, "episode", 3), derive_seed(8, "episode", 3));
        // label/index boundaries must not alias
        assert_ne!(derive_seed(1, "ab", 0), derive_seed(1, "a", 0));
    }
}
