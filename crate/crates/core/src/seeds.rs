//! Stream splitting for reproducible randomness.
//!
//! Every random draw in the crate descends from one user seed. A component
//! asks for the generator at a *path* of integers, e.g.
//! `[streams::TRAINER, epoch, phase, pass, center]`. The path is hashed with
//! FNV-1a (64-bit, little-endian words) into a ChaCha8 stream id and the
//! user seed is expanded with `ChaCha8Rng::seed_from_u64`. Two different
//! paths therefore never share a keystream, and any sub-seed can be
//! recomputed from the path alone.

use std::hash::Hasher;

use fnv::FnvHasher;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Top-level stream labels.
pub mod streams {
    pub const GENERATOR_INIT: u64 = 1;
    pub const DISCRIMINATOR_INIT: u64 = 2;
    pub const TRAINER: u64 = 3;
    pub const FOLDS: u64 = 4;
    pub const SPARSITY: u64 = 5;
    pub const AUDIT: u64 = 6;
    pub const SYNTH: u64 = 7;
}

pub fn stream_id(path: &[u64]) -> u64 {
    let mut h = FnvHasher::default();
    for word in path {
        h.write(&word.to_le_bytes());
    }
    h.finish()
}

pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(path));
    rng
}

/// Derives a plain `u64` sub-seed, for APIs that take a seed rather than a
/// generator.
pub fn sub_seed(seed: u64, path: &[u64]) -> u64 {
    use rand::RngCore;
    stream_rng(seed, path).next_u64()
}

/// FNV-1a over a byte slice; used for file checksums and config hashes.
pub fn checksum(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}
