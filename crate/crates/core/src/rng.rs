//! Deterministic, labeled randomness.
//!
//! Every "draw at random" step in the schemes pulls from its own stream,
//! keyed by the run seed and a label such as `p/1/2` (placement permutation
//! of file 1 for block 2). Streams with different labels are independent for
//! all practical purposes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::model::{Bits, Library, SystemParams};

pub type Stream = ChaCha20Rng;

pub fn seeded_rng(seed: u64, label: impl AsRef<[u8]>) -> Stream {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_ref());
    let key: [u8; 32] = h.finalize().into();
    ChaCha20Rng::from_seed(key)
}

/// `N` files of `B` i.i.d. uniform bits, drawn from the `library` stream.
pub fn random_library(params: &SystemParams) -> Library {
    let mut rng = seeded_rng(params.seed, b"library");
    let files = (0..params.files)
        .map(|_| Bits::from_bools((0..params.file_bits).map(|_| rng.random::<bool>())))
        .collect();
    Library::new(files)
}
