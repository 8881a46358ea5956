//! Keyed random streams.
//!
//! A [`Stream`] is identified by a master seed and a path of labels. The path
//! is hashed into a ChaCha8 key, and ChaCha's 64-bit stream id selects an
//! independent sub-sequence per work item. Draws therefore depend only on
//! `(seed, labels, index)`, never on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, PartialEq, Eq)]
pub struct Stream {
    seed: u64,
    path: String,
    key: [u8; 32],
}

impl std::fmt::Debug for Stream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stream")
            .field("seed", &self.seed)
            .field("path", &self.path)
            .finish()
    }
}

impl Stream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"embgeo.stream.v1");
        h.update(seed.to_le_bytes());
        absorb(&mut h, label.as_bytes());
        Stream {
            seed,
            path: label.to_string(),
            key: h.finalize().into(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Slash-joined label path, for diagnostics.
    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn child(&self, label: &str) -> Stream {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update([0u8]);
        absorb(&mut h, label.as_bytes());
        Stream {
            seed: self.seed,
            path: format!("{}/{}", self.path, label),
            key: h.finalize().into(),
        }
    }

    pub fn child_index(&self, index: u64) -> Stream {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update([1u8]);
        h.update(index.to_le_bytes());
        Stream {
            seed: self.seed,
            path: format!("{}/#{}", self.path, index),
            key: h.finalize().into(),
        }
    }

    /// Child keyed by the exact bit pattern of a real parameter (e.g. a scale).
    pub fn child_real(&self, value: f64) -> Stream {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update([2u8]);
        h.update(value.to_bits().to_le_bytes());
        Stream {
            seed: self.seed,
            path: format!("{}/{}", self.path, value),
            key: h.finalize().into(),
        }
    }

    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.key)
    }

    /// Independent generator for work item `index` (ChaCha stream id).
    pub fn rng_at(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

fn absorb(h: &mut Sha256, bytes: &[u8]) {
    h.update((bytes.len() as u64).to_le_bytes());
    h.update(bytes);
}
