//! Seed derivation. All randomness in the crate flows from a single `u64`
//! seed; independent consumers take separate ChaCha streams so that their
//! draws never depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids used inside the crate.
pub mod stream {
    pub const GENERATE: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const LANCZOS: u64 = 3;
    /// k-means streams are `KMEANS_BASE + candidate index`.
    pub const KMEANS_BASE: u64 = 1 << 32;
}

/// Counter-based generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
