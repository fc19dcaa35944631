//! Named, seedable random streams.
//!
//! Every stochastic stage (parameter init, epoch shuffling, augmentation,
//! subset sampling, data generation) draws from its own stream derived from
//! a master seed and a stream name. Streams are independent: adding draws to
//! one never shifts another, so runs are reproducible component by component.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives a 32-byte ChaCha seed from the master seed and a stream name
/// using an FNV-1a walk over the name bytes. Stable across platforms.
fn derive_seed(master: u64, name: &str) -> [u8; 32] {
    const FNV_OFFSET: u64 = 0xcbf29ce484222325;
    const FNV_PRIME: u64 = 0x100000001b3;
    let mut h = FNV_OFFSET ^ master;
    for &b in name.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    // Expand the 64-bit hash into 4 lanes with splitmix64.
    let mut seed = [0u8; 32];
    let mut x = h;
    for lane in seed.chunks_exact_mut(8) {
        x = x.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = x;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        lane.copy_from_slice(&z.to_le_bytes());
    }
    seed
}

/// A reproducible generator for one named stream.
pub fn stream(master: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(master, name))
}

/// A sub-stream indexed by an integer (per-FOI, per-epoch, per-class...).
pub fn substream(master: u64, name: &str, index: u64) -> ChaCha8Rng {
    stream(master ^ index.rotate_left(17), name)
}
