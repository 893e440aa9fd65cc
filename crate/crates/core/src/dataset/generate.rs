use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::PointSet;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

/// Concentric rings, one per `(count, radius)` pair. Points are evenly spaced
/// in angle; each radius gets independent Gaussian jitter.
#[derive(Clone, Debug, PartialEq)]
pub struct RingsParams {
    pub counts: Vec<usize>,
    pub radii: Vec<f64>,
    pub jitter: f64,
}

/// `count` parallel horizontal segments of length `length`, `spacing` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct LinesParams {
    pub count: usize,
    pub n_per: usize,
    pub length: f64,
    pub spacing: f64,
    pub jitter: f64,
}

/// Isotropic Gaussian blobs, `n_per` points around each center.
#[derive(Clone, Debug, PartialEq)]
pub struct BlobsParams {
    pub centers: Vec<Vec<f64>>,
    pub n_per: usize,
    pub spread: f64,
}

/// Uniform balls with individual counts and radii, so densities differ
/// between clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseBlobsParams {
    pub centers: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Rings(RingsParams),
    Lines(LinesParams),
    Blobs(BlobsParams),
    SparseBlobs(SparseBlobsParams),
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Rings(_) => "rings",
            Shape::Lines(_) => "lines",
            Shape::Blobs(_) => "blobs",
            Shape::SparseBlobs(_) => "sparse_blobs",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |what: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!("{what} must be positive and finite, got {v}")))
            }
        };
        let non_negative = |what: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!("{what} must be non-negative and finite, got {v}")))
            }
        };
        let counts_ok = |counts: &[usize]| {
            if counts.is_empty() || counts.contains(&0) {
                Err(Error::param("every count must be at least 1"))
            } else {
                Ok(())
            }
        };
        let centers_ok = |centers: &[Vec<f64>]| {
            let dim = centers.first().map_or(0, Vec::len);
            if dim == 0 || centers.iter().any(|c| c.len() != dim) {
                return Err(Error::param("centers must be non-empty with equal dimension"));
            }
            if centers.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::param("center coordinates must be finite"));
            }
            Ok(())
        };
        match self {
            Shape::Rings(p) => {
                counts_ok(&p.counts)?;
                if p.counts.len() != p.radii.len() {
                    return Err(Error::param("rings need one radius per count"));
                }
                for &r in &p.radii {
                    positive("ring radius", r)?;
                }
                for (a, ra) in p.radii.iter().enumerate() {
                    if p.radii[a + 1..].contains(ra) {
                        return Err(Error::param(format!("two rings share radius {ra}")));
                    }
                }
                non_negative("jitter", p.jitter)
            }
            Shape::Lines(p) => {
                counts_ok(&[p.count, p.n_per])?;
                positive("line length", p.length)?;
                positive("line spacing", p.spacing)?;
                non_negative("jitter", p.jitter)
            }
            Shape::Blobs(p) => {
                centers_ok(&p.centers)?;
                counts_ok(&[p.n_per])?;
                positive("spread", p.spread)
            }
            Shape::SparseBlobs(p) => {
                centers_ok(&p.centers)?;
                counts_ok(&p.counts)?;
                if p.counts.len() != p.centers.len() || p.radii.len() != p.centers.len() {
                    return Err(Error::param("sparse blobs need one count and radius per center"));
                }
                p.radii.iter().try_for_each(|&r| positive("radius", r))
            }
        }
    }

    fn total(&self) -> usize {
        match self {
            Shape::Rings(p) => p.counts.iter().sum(),
            Shape::Lines(p) => p.count * p.n_per,
            Shape::Blobs(p) => p.centers.len() * p.n_per,
            Shape::SparseBlobs(p) => p.counts.iter().sum(),
        }
    }
}

/// Samples a labeled point set. Output depends only on `(shape, seed)`.
pub fn generate(shape: &Shape, seed: u64) -> Result<PointSet> {
    shape.validate()?;
    let mut rng = rng_for(seed, stream::GENERATE);
    let total = shape.total();
    let dim = match shape {
        Shape::Blobs(p) => p.centers[0].len(),
        Shape::SparseBlobs(p) => p.centers[0].len(),
        _ => 2,
    };
    let mut coords = Vec::with_capacity(total * dim);
    let mut labels = Vec::with_capacity(total);

    match shape {
        Shape::Rings(p) => {
            let jitter = Normal::new(0.0, p.jitter).map_err(|e| Error::param(e.to_string()))?;
            for (class, (&n, &r)) in p.counts.iter().zip(&p.radii).enumerate() {
                for k in 0..n {
                    let theta = TAU * k as f64 / n as f64;
                    let rad = r + jitter.sample(&mut rng);
                    coords.push(rad * theta.cos());
                    coords.push(rad * theta.sin());
                    labels.push(class);
                }
            }
        }
        Shape::Lines(p) => {
            let jitter = Normal::new(0.0, p.jitter).map_err(|e| Error::param(e.to_string()))?;
            let step = if p.n_per > 1 {
                p.length / (p.n_per - 1) as f64
            } else {
                0.0
            };
            for class in 0..p.count {
                let y = class as f64 * p.spacing;
                for k in 0..p.n_per {
                    coords.push(k as f64 * step + jitter.sample(&mut rng));
                    coords.push(y + jitter.sample(&mut rng));
                    labels.push(class);
                }
            }
        }
        Shape::Blobs(p) => {
            for (class, c) in p.centers.iter().enumerate() {
                for _ in 0..p.n_per {
                    for &x in c {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        coords.push(x + p.spread * z);
                    }
                    labels.push(class);
                }
            }
        }
        Shape::SparseBlobs(p) => {
            for (class, ((c, &n), &r)) in p.centers.iter().zip(&p.counts).zip(&p.radii).enumerate() {
                for _ in 0..n {
                    // Uniform in the ball: Gaussian direction, radius r * u^(1/d).
                    let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                    let u: f64 = rng.random();
                    let rad = r * u.powf(1.0 / dim as f64);
                    coords.extend(c.iter().zip(&dir).map(|(x, v)| x + rad * v / norm));
                    labels.push(class);
                }
            }
        }
    }
    PointSet::new(shape.name(), dim, coords, Some(labels))
}

/// Appends `floor(fraction * N)` points drawn uniformly from the bounding box
/// of `ps`, widened by 10% (5% per side). Noise points get their own label:
/// one past the existing classes, or `1` (with every original point labeled
/// `0`) when `ps` is unlabeled.
pub fn inject_noise(ps: &PointSet, fraction: f64, seed: u64) -> Result<PointSet> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param(format!(
            "noise fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let n = ps.len();
    let extra = (fraction * n as f64).floor() as usize;
    if extra == 0 {
        return Err(Error::param(format!(
            "noise fraction {fraction} of {n} points rounds to zero points"
        )));
    }
    let bounds: Vec<(f64, f64)> = ps
        .bounding_box()
        .into_iter()
        .map(|(lo, hi)| {
            let margin = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
            (lo - margin, hi + margin)
        })
        .collect();

    let mut rng = rng_for(seed, stream::NOISE);
    let mut coords = ps.coords().to_vec();
    coords.reserve(extra * ps.dim());
    for _ in 0..extra {
        for &(lo, hi) in &bounds {
            coords.push(rng.random_range(lo..hi));
        }
    }

    let (mut labels, noise_label) = match ps.labels() {
        Some(l) => (l.to_vec(), ps.class_count().unwrap_or(0)),
        None => (vec![0; n], 1),
    };
    labels.resize(n + extra, noise_label);
    let name = format!("{}+noise{}", ps.name(), (fraction * 100.0).round());
    Ok(PointSet::new(name, ps.dim(), coords, Some(labels))?.with_noise_label(noise_label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rings() -> Shape {
        Shape::Rings(RingsParams {
            counts: vec![300, 300],
            radii: vec![1.0, 3.0],
            jitter: 0.05,
        })
    }

    #[test]
    fn rings_shape_and_labels() {
        let ps = generate(&rings(), 1).unwrap();
        assert_eq!(ps.len(), 600);
        assert_eq!(ps.dim(), 2);
        assert_eq!(ps.class_count(), Some(2));
        let mean_r = |class: usize| {
            let (s, c) = ps
                .points()
                .zip(ps.labels().unwrap())
                .filter(|(_, &l)| l == class)
                .fold((0.0, 0), |(s, c), (p, _)| (s + p[0].hypot(p[1]), c + 1));
            s / c as f64
        };
        assert!((mean_r(0) - 1.0).abs() < 0.02);
        assert!((mean_r(1) - 3.0).abs() < 0.02);
    }

    #[test]
    fn blobs_shape() {
        let shape = Shape::Blobs(BlobsParams {
            centers: vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]],
            n_per: 100,
            spread: 0.5,
        });
        let ps = generate(&shape, 7).unwrap();
        assert_eq!(ps.len(), 300);
        assert_eq!(ps.class_count(), Some(3));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate(&rings(), 1).unwrap(), generate(&rings(), 1).unwrap());
        assert_ne!(generate(&rings(), 1).unwrap(), generate(&rings(), 2).unwrap());
    }

    #[test]
    fn invalid_parameters() {
        let bad = Shape::Rings(RingsParams {
            counts: vec![10, 10],
            radii: vec![2.0, 2.0],
            jitter: 0.1,
        });
        assert!(generate(&bad, 0).is_err());
        let bad = Shape::Blobs(BlobsParams {
            centers: vec![vec![0.0]],
            n_per: 0,
            spread: 1.0,
        });
        assert!(generate(&bad, 0).is_err());
        let bad = Shape::SparseBlobs(SparseBlobsParams {
            centers: vec![vec![0.0, 0.0]],
            counts: vec![5],
            radii: vec![-1.0],
        });
        assert!(generate(&bad, 0).is_err());
    }

    #[test]
    fn sparse_blobs_stay_inside_radius() {
        let shape = Shape::SparseBlobs(SparseBlobsParams {
            centers: vec![vec![0.0, 0.0], vec![5.0, 5.0]],
            counts: vec![50, 20],
            radii: vec![1.0, 2.0],
        });
        let ps = generate(&shape, 3).unwrap();
        for (p, &l) in ps.points().zip(ps.labels().unwrap()) {
            let (c, r) = if l == 0 { ((0.0, 0.0), 1.0) } else { ((5.0, 5.0), 2.0) };
            assert!((p[0] - c.0).hypot(p[1] - c.1) <= r + 1e-12);
        }
    }

    #[test]
    fn noise_counts() {
        let base = generate(
            &Shape::Blobs(BlobsParams {
                centers: vec![vec![0.0, 0.0]],
                n_per: 100,
                spread: 1.0,
            }),
            0,
        )
        .unwrap();
        let noisy = inject_noise(&base, 0.3, 4).unwrap();
        assert_eq!(noisy.len(), 130);
        assert_eq!(noisy.noise_label(), Some(1));
        let noise = noisy.labels().unwrap().iter().filter(|&&l| l == 1).count();
        assert_eq!(noise, 30);
        assert_eq!(noisy, inject_noise(&base, 0.3, 4).unwrap());
        assert_eq!(&noisy.coords()[..200], base.coords());

        let big = generate(&rings(), 1).unwrap();
        assert_eq!(inject_noise(&big, 0.5, 1).unwrap().len(), 900);
    }

    #[test]
    fn noise_stays_in_widened_box() {
        let base = generate(&rings(), 1).unwrap();
        let bb = base.bounding_box();
        let noisy = inject_noise(&base, 0.5, 9).unwrap();
        for p in noisy.points().skip(base.len()) {
            for (v, (lo, hi)) in p.iter().zip(&bb) {
                let m = 0.05 * (hi - lo);
                assert!(*v >= lo - m && *v <= hi + m);
            }
        }
    }

    #[test]
    fn noise_errors() {
        let ps = PointSet::new("one", 1, vec![0.0], None).unwrap();
        assert!(inject_noise(&ps, 0.5, 0).is_err());
        assert!(inject_noise(&ps, 0.0, 0).is_err());
        assert!(inject_noise(&ps, 1.5, 0).is_err());
        let two = PointSet::new("two", 1, vec![0.0, 1.0], None).unwrap();
        let noisy = inject_noise(&two, 0.5, 0).unwrap();
        assert_eq!(noisy.labels(), Some(&[0, 0, 1][..]));
    }
}
