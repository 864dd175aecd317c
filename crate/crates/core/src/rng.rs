//! Seed streams: one root seed, independent derived generators per purpose.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// Root of a family of reproducible random streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    root: u64,
}

impl SeedStream {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Generator for `(purpose, index)`. Distinct labels give independent streams.
    pub fn rng(&self, purpose: &str, index: u64) -> Rng {
        Rng::from_seed(self.derive_bytes(purpose, index))
    }

    /// Child seed stream, e.g. one per trial.
    pub fn child(&self, purpose: &str, index: u64) -> SeedStream {
        let b = self.derive_bytes(purpose, index);
        SeedStream::new(u64::from_le_bytes(b[..8].try_into().unwrap()))
    }

    fn derive_bytes(&self, purpose: &str, index: u64) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.root.to_le_bytes());
        h.update((purpose.len() as u64).to_le_bytes());
        h.update(purpose.as_bytes());
        h.update(index.to_le_bytes());
        h.finalize().into()
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    SeedStream::new(seed).rng("default", 0)
}
