use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const DOMAIN: &[u8] = b"pitplot/substream/v1";

/// Independent random stream for one project, keyed by (seed, project id).
///
/// Each block of iterations gets its own ChaCha generator whose key is a
/// hash of (seed, key, block index), so results do not depend on how blocks
/// are scheduled across threads or on project order in the input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSubstream {
    seed: u64,
    key: String,
}

impl RandomSubstream {
    pub fn new(seed: u64, key: impl Into<String>) -> Self {
        Self {
            seed,
            key: key.into(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn block_rng(&self, block: u64) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(DOMAIN);
        h.update(self.seed.to_le_bytes());
        h.update((self.key.len() as u64).to_le_bytes());
        h.update(self.key.as_bytes());
        h.update(block.to_le_bytes());
        let digest: [u8; 32] = h.finalize().into();
        ChaCha8Rng::from_seed(digest)
    }
}
