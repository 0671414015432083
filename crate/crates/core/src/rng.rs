//! Repository-wide random number policy.
//!
//! Every stochastic routine draws from [`RepoRng`], which is ChaCha8 seeded
//! through `SeedableRng::seed_from_u64`. ChaCha8 output is specified by the
//! algorithm itself and does not depend on platform or crate internals, so a
//! seed reproduces the same stream everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RepoRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> RepoRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed (splitmix64 finalizer), used for
/// per-trial and per-cell streams in the experiment harness.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
