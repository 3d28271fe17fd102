//! Reproducible random streams.
//!
//! Every replicate owns an independent ChaCha8 stream. The 256-bit key is
//! built from the 64-bit master seed and a 64-bit hash of a stream tag (one
//! tag per sampling site inside an experiment); the ChaCha stream id is the
//! replicate index. The same `(seed, tag, index)` therefore always yields the
//! same stream, whichever worker thread happens to run the replicate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// FNV-1a over the tag bytes.
pub fn tag_hash(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive the stream for replicate `index` of the sampling site `tag`.
pub fn replicate_rng(master_seed: u64, tag: &str, index: u64) -> SimRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag_hash(tag).to_le_bytes());
    key[16..24].copy_from_slice(b"bplab-v1");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// A single stream for code that is not replicate-indexed.
pub fn seeded(seed: u64) -> SimRng {
    replicate_rng(seed, "", 0)
}
