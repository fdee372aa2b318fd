//! Stable sub-seed derivation.
//!
//! Every randomized component receives a seed derived from a single root
//! seed, a component label and an index, so results do not depend on the
//! order or the degree of parallelism in which components run.

use sha2::{Digest, Sha256};

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

pub fn sha256_hex(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        assert_eq!(derive_seed(7, "jl", 3), derive_seed(7, "jl", 3));
        assert_ne!(derive_seed(7, "jl", 3), derive_seed(7, "jl", 4));
        assert_ne!(derive_seed(7, "jl", 3), derive_seed(7, "jm", 3));
        assert_ne!(derive_seed(7, "jl", 3), derive_seed(8, "jl", 3));
    }
}
