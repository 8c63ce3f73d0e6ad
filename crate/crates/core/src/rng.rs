//! Keyed random streams.
//!
//! Every random quantity is drawn from a ChaCha stream whose 256-bit key is
//! `(seed, coordinate, role, index)`, so any piece of a randomization can be
//! regenerated on demand without stored state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub(crate) enum Role {
    Matrix = 1,
    Shift = 2,
    Permutation = 3,
    Points = 4,
}

pub(crate) fn keyed_rng(seed: u64, coordinate: u32, role: Role, index: u128) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..12].copy_from_slice(&coordinate.to_le_bytes());
    key[12..16].copy_from_slice(&(role as u32).to_le_bytes());
    key[16..].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed.
///
/// For a fixed `(master, stream)` the map `index -> seed` is injective, so
/// distinct replications never share a seed.
pub fn derive_seed(master: u64, stream: u32, index: u32) -> u64 {
    let inner = splitmix64((u64::from(stream) << 32) | u64::from(index));
    splitmix64(splitmix64(master) ^ inner)
}
