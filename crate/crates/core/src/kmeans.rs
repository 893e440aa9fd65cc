//! Lloyd's k-means with k-means++ seeding.

use rand::Rng;
use serde::Serialize;

use crate::rng::rng_for;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
    /// Independent seedings; the lowest inertia wins.
    pub restarts: usize,
    /// RNG stream; restart `r` uses `stream + r`.
    pub stream: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
            restarts: 1,
            stream: crate::rng::stream::KMEANS_BASE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    /// `k x dim`, row-major.
    pub centroids: Vec<f64>,
    pub inertia: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn seed_plus_plus(data: &[f64], dim: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n = data.len() / dim;
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(point(first));
    let mut best: Vec<f64> = (0..n).map(|i| d2(point(i), point(first))).collect();
    for _ in 1..k {
        let total: f64 = best.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in best.iter().enumerate() {
                if r < w {
                    chosen = i;
                    break;
                }
                r -= w;
            }
            // Guard against rounding landing on a zero-weight tail.
            if best[chosen] == 0.0 {
                chosen = best.iter().rposition(|&w| w > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.extend_from_slice(point(pick));
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.min(d2(point(i), point(pick)));
        }
    }
    centroids
}

/// Index of the nearest centroid; ties go to the lower index.
fn assign(p: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, cen) in centroids.chunks_exact(dim).enumerate() {
        let d = d2(p, cen);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(data: &[f64], dim: usize, k: usize, mut centroids: Vec<f64>, opts: &KMeansOptions) -> KMeansResult {
    let n = data.len() / dim;
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut last_inertia = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        for i in 0..n {
            let (c, d) = assign(&data[i * dim..(i + 1) * dim], &centroids, dim);
            labels[i] = c;
            dists[i] = d;
        }
        let inertia: f64 = dists.iter().sum();
        debug_assert!(inertia <= last_inertia * (1.0 + 1e-9) + 1e-12);
        last_inertia = inertia;

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for t in 0..dim {
                sums[labels[i] * dim + t] += data[i * dim + t];
            }
        }
        let mut next = centroids.clone();
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                for t in 0..dim {
                    next[c * dim + t] = sums[c * dim + t] / counts[c] as f64;
                }
            } else {
                // Empty cluster: restart it at the point farthest from its
                // centroid.
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                taken[far] = true;
                dists[far] = 0.0;
                next[c * dim..(c + 1) * dim].copy_from_slice(&data[far * dim..(far + 1) * dim]);
            }
        }
        let shift = centroids
            .chunks_exact(dim)
            .zip(next.chunks_exact(dim))
            .map(|(a, b)| d2(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift <= opts.tol {
            converged = true;
            break;
        }
    }
    let mut inertia = 0.0;
    for i in 0..n {
        let (c, d) = assign(&data[i * dim..(i + 1) * dim], &centroids, dim);
        labels[i] = c;
        inertia += d;
    }
    KMeansResult {
        labels,
        centroids,
        inertia,
        iterations,
        converged,
    }
}

/// Clusters `data` (row-major, `dim` columns) into `k` groups.
pub fn kmeans(data: &[f64], dim: usize, k: usize, seed: u64, opts: &KMeansOptions) -> Result<KMeansResult> {
    if dim == 0 || !data.len().is_multiple_of(dim) {
        return Err(Error::param(format!(
            "{} values do not form rows of width {dim}",
            data.len()
        )));
    }
    let n = data.len() / dim;
    if k == 0 || k > n {
        return Err(Error::param(format!("k = {k} is outside 1..={n}")));
    }
    if opts.restarts == 0 || opts.max_iter == 0 {
        return Err(Error::param("k-means needs at least one restart and one iteration"));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("k-means input contains a non-finite value"));
    }
    let mut best: Option<KMeansResult> = None;
    for r in 0..opts.restarts {
        let mut rng = rng_for(seed, opts.stream.wrapping_add(r as u64));
        let init = seed_plus_plus(data, dim, k, &mut rng);
        let res = lloyd(data, dim, k, init, opts);
        if best.as_ref().is_none_or(|b| res.inertia < b.inertia) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> Vec<f64> {
        let mut v = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)] {
            for i in 0..20 {
                let a = i as f64 * 0.7;
                v.extend_from_slice(&[cx + 0.3 * a.cos(), cy + 0.3 * a.sin()]);
            }
        }
        v
    }

    #[test]
    fn separates_well_spaced_blobs() {
        let data = blobs();
        let res = kmeans(&data, 2, 3, 7, &KMeansOptions::default()).unwrap();
        for b in 0..3 {
            let l = res.labels[b * 20];
            assert!(res.labels[b * 20..(b + 1) * 20].iter().all(|&x| x == l));
        }
        assert!(res.converged);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let data = blobs();
        let a = kmeans(&data, 2, 4, 3, &KMeansOptions::default()).unwrap();
        let b = kmeans(&data, 2, 4, 3, &KMeansOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_points_fill_every_cluster() {
        let data = vec![1.0; 10];
        let res = kmeans(&data, 1, 3, 0, &KMeansOptions::default()).unwrap();
        assert_eq!(res.inertia, 0.0);
        assert_eq!(res.labels.len(), 10);
    }

    #[test]
    fn k_equals_n() {
        let data = vec![0.0, 1.0, 5.0];
        let res = kmeans(&data, 1, 3, 1, &KMeansOptions::default()).unwrap();
        assert_eq!(res.inertia, 0.0);
        let mut l = res.labels.clone();
        l.sort();
        assert_eq!(l, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(kmeans(&[0.0, 1.0], 1, 3, 0, &KMeansOptions::default()).is_err());
        assert!(kmeans(&[0.0, 1.0, 2.0], 2, 1, 0, &KMeansOptions::default()).is_err());
        assert!(kmeans(&[f64::NAN], 1, 1, 0, &KMeansOptions::default()).is_err());
    }
}
