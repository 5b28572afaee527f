//! Versioned binary checkpoints.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic        8 bytes  "SEMBCKPT"
//! version      u32
//! config       u32 length + UTF-8 key=value text
//! graph sum    u64
//! epoch        u64      completed outer epochs
//! rng seed     32 bytes ChaCha8 key
//! rng stream   u64
//! rng word pos u128
//! generator    u64 rows, u64 dim, rows*dim f64
//! discriminator (same)
//! checksum     u64      FNV-1a of every preceding byte
//! ```

use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use super::{TrainConfig, TrainState};
use crate::{seeds, EmbeddingMatrix, Error, Result};

pub const MAGIC: &[u8; 8] = b"SEMBCKPT";
pub const VERSION: u32 = 1;

pub fn encode(state: &TrainState) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let config = state.config.to_text();
    out.extend_from_slice(&(config.len() as u32).to_le_bytes());
    out.extend_from_slice(config.as_bytes());
    out.extend_from_slice(&state.graph_checksum.to_le_bytes());
    out.extend_from_slice(&(state.epoch as u64).to_le_bytes());
    out.extend_from_slice(&state.rng.get_seed());
    out.extend_from_slice(&state.rng.get_stream().to_le_bytes());
    out.extend_from_slice(&state.rng.get_word_pos().to_le_bytes());
    state.generator.encode(&mut out);
    state.discriminator.encode(&mut out);
    let sum = seeds::checksum(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint("truncated checkpoint".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn matrix(&mut self) -> Result<EmbeddingMatrix> {
        let rows = self.u64()? as usize;
        let dim = self.u64()? as usize;
        let count = rows
            .checked_mul(dim)
            .ok_or_else(|| Error::Checkpoint("matrix shape overflows".into()))?;
        let raw = self.take(count.checked_mul(8).ok_or_else(|| Error::Checkpoint("matrix too large".into()))?)?;
        let mut m = EmbeddingMatrix::zeros(rows, dim);
        for (dst, chunk) in m.values_mut().iter_mut().zip(raw.chunks_exact(8)) {
            *dst = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        }
        Ok(m)
    }
}

pub fn decode(bytes: &[u8]) -> Result<TrainState> {
    if bytes.len() < MAGIC.len() + 4 + 8 || &bytes[..8] != MAGIC {
        return Err(Error::Checkpoint("not a checkpoint (bad magic)".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    let computed = seeds::checksum(body);
    if stored != computed {
        return Err(Error::ChecksumMismatch { stored, computed });
    }
    let mut r = Reader { bytes: body, pos: 8 };
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported checkpoint version {version} (expected {VERSION})"
        )));
    }
    let len = r.u32()? as usize;
    let text = std::str::from_utf8(r.take(len)?)
        .map_err(|_| Error::Checkpoint("config block is not UTF-8".into()))?;
    let config = TrainConfig::from_text(text)?;
    let graph_checksum = r.u64()?;
    let epoch = r.u64()? as usize;
    let seed: [u8; 32] = r.array()?;
    let stream = r.u64()?;
    let word_pos = u128::from_le_bytes(r.array()?);
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream);
    rng.set_word_pos(word_pos);
    let generator = r.matrix()?;
    let discriminator = r.matrix()?;
    if r.pos != body.len() {
        return Err(Error::Checkpoint("trailing bytes in checkpoint".into()));
    }
    Ok(TrainState {
        config,
        graph_checksum,
        epoch,
        rng,
        generator,
        discriminator,
    })
}

pub fn save(state: &TrainState, path: &Path) -> Result<()> {
    std::fs::write(path, encode(state)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<TrainState> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
