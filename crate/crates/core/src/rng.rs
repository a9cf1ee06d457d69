//! Seeding: every random draw descends from a single `u64` master seed.
//!
//! Child seeds come from a splitmix64-style mix of the parent seed and a path
//! of integer labels (point index, realization index, purpose tag), so a
//! stream depends only on its position in the sweep and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere in the crate.
pub type Rng64 = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the child stream at `path` below `parent`.
pub fn child_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(parent), |acc, &label| splitmix64(acc ^ splitmix64(label.wrapping_add(GOLDEN))))
}

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labels separating independent purposes under the same realization seed.
pub mod stream {
    pub const TEMPLATE: u64 = 1;
    pub const INITIAL_STATE: u64 = 2;
    pub const INPUTS: u64 = 3;
    pub const HAAR: u64 = 4;
    pub const SECOND_STATE: u64 = 5;
}
