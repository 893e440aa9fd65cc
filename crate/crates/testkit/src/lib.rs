//! Slow, obviously-correct reference implementations for testing.
//!
//! Nothing here shares code with `refknn`; inputs and outputs are plain
//! vectors so the oracles can be compared against any implementation.

// Index loops mirror the textbook formulas on purpose.
#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod dense;
pub mod graph;
pub mod metrics;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// `n` points in `[0, 1)^dim`, row-major.
pub fn uniform_points(n: usize, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n * dim).map(|_| rng.random::<f64>()).collect()
}

/// `n` labels drawn uniformly from `0..k`.
pub fn random_labels(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Every labeling of `n` points with ids in `0..k`, in lexicographic order.
pub fn all_labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    loop {
        out.push(cur.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < k {
                break;
            }
            cur[pos] = 0;
        }
    }
}
