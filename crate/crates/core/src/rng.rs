//! Seeding policy for reproducible, parallel Monte Carlo.
//!
//! Every draw in the crate comes from a ChaCha20 stream seeded by a 64-bit
//! value. Independent workers never share a generator; they derive disjoint
//! substreams from a base seed instead.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

pub fn from_seed(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Seed of replicate `replicate` in experiment cell `cell`.
pub fn substream_seed(seed: u64, cell: u64, replicate: u64) -> u64 {
    seed ^ (cell << 20) ^ replicate
}
