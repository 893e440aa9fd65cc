//! Text form of a generator invocation, e.g.
//! `rings:n=300,300;r=1,3;jitter=0.05` or
//! `blobs:centers=(0,0)(10,0)(0,10);n=100;spread=0.5;noise=0.2`.
//!
//! Omitted keys take the defaults of [`GeneratorSpec::defaults`].

use std::fmt;
use std::str::FromStr;

use super::generate::{generate, inject_noise, BlobsParams, LinesParams, RingsParams, Shape, SparseBlobsParams};
use super::PointSet;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub shape: Shape,
    /// Fraction of uniform noise appended after generation.
    pub noise: Option<f64>,
}

impl GeneratorSpec {
    pub fn defaults(shape: &str) -> Result<Self> {
        let shape = match shape {
            "rings" => Shape::Rings(RingsParams {
                counts: vec![300, 300],
                radii: vec![1.0, 3.0],
                jitter: 0.05,
            }),
            "lines" => Shape::Lines(LinesParams {
                count: 3,
                n_per: 200,
                length: 10.0,
                spacing: 2.0,
                jitter: 0.03,
            }),
            "blobs" => Shape::Blobs(BlobsParams {
                centers: vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]],
                n_per: 100,
                spread: 0.5,
            }),
            "sparse_blobs" => Shape::SparseBlobs(SparseBlobsParams {
                centers: vec![vec![0.0, 0.0], vec![5.0, 0.0], vec![2.5, 5.0]],
                counts: vec![200, 60, 40],
                radii: vec![1.0, 1.5, 1.5],
            }),
            other => return Err(Error::InvalidSpec(format!("unknown shape {other:?}"))),
        };
        Ok(Self { shape, noise: None })
    }

    /// Starts from the shape defaults and overrides one key per pair.
    pub fn from_pairs<'a>(shape: &str, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut spec = Self::defaults(shape)?;
        for (key, value) in pairs {
            spec.set(key.trim(), value.trim())?;
        }
        Ok(spec)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (shape, rest) = text.split_once(':').unwrap_or((text, ""));
        let pairs = rest
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.split_once('=')
                    .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(shape.trim(), pairs)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "noise" {
            self.noise = Some(scalar(key, value)?);
            return Ok(());
        }
        match (&mut self.shape, key) {
            (Shape::Rings(p), "n") => p.counts = counts(key, value)?,
            (Shape::Rings(p), "r") => p.radii = reals(key, value)?,
            (Shape::Rings(p), "jitter") => p.jitter = scalar(key, value)?,
            (Shape::Lines(p), "count") => p.count = count(key, value)?,
            (Shape::Lines(p), "n") => p.n_per = count(key, value)?,
            (Shape::Lines(p), "length") => p.length = scalar(key, value)?,
            (Shape::Lines(p), "spacing") => p.spacing = scalar(key, value)?,
            (Shape::Lines(p), "jitter") => p.jitter = scalar(key, value)?,
            (Shape::Blobs(p), "centers") => p.centers = tuples(key, value)?,
            (Shape::Blobs(p), "n") => p.n_per = count(key, value)?,
            (Shape::Blobs(p), "spread") => p.spread = scalar(key, value)?,
            (Shape::SparseBlobs(p), "centers") => p.centers = tuples(key, value)?,
            (Shape::SparseBlobs(p), "n") => p.counts = counts(key, value)?,
            (Shape::SparseBlobs(p), "r") => p.radii = reals(key, value)?,
            (shape, key) => {
                return Err(Error::InvalidSpec(format!(
                    "unknown key {key:?} for shape {}",
                    shape.name()
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        match self.noise {
            Some(f) if !(f > 0.0 && f <= 1.0) => {
                Err(Error::param(format!("noise fraction must lie in (0, 1], got {f}")))
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<PointSet> {
        self.validate()?;
        let ps = generate(&self.shape, seed)?;
        match self.noise {
            Some(f) => inject_noise(&ps, f, seed),
            None => Ok(ps),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn join_tuples(v: &[Vec<f64>]) -> String {
    v.iter().map(|c| format!("({})", join(c))).collect()
}

/// Canonical text form; parses back to an equal spec.
impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Rings(p) => write!(
                f,
                "rings:n={};r={};jitter={}",
                join(&p.counts),
                join(&p.radii),
                p.jitter
            )?,
            Shape::Lines(p) => write!(
                f,
                "lines:count={};n={};length={};spacing={};jitter={}",
                p.count, p.n_per, p.length, p.spacing, p.jitter
            )?,
            Shape::Blobs(p) => write!(
                f,
                "blobs:centers={};n={};spread={}",
                join_tuples(&p.centers),
                p.n_per,
                p.spread
            )?,
            Shape::SparseBlobs(p) => write!(
                f,
                "sparse_blobs:centers={};n={};r={}",
                join_tuples(&p.centers),
                join(&p.counts),
                join(&p.radii)
            )?,
        }
        if let Some(noise) = self.noise {
            write!(f, ";noise={noise}")?;
        }
        Ok(())
    }
}

fn scalar(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidSpec(format!("{key}: {value:?} is not a finite number")))
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::InvalidSpec(format!("{key}: {value:?} is not a count")))
}

fn reals(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}

fn counts(key: &str, value: &str) -> Result<Vec<usize>> {
    value.split(',').map(|v| count(key, v.trim())).collect()
}

/// `(x,y)(x,y)...`
fn tuples(key: &str, value: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    let mut rest = value.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| Error::InvalidSpec(format!("{key}: expected (x,y,...) tuples in {value:?}")))?;
        out.push(reals(key, inner.0)?);
        rest = inner.1.trim_start();
    }
    if out.is_empty() {
        return Err(Error::InvalidSpec(format!("{key}: no tuples given")));
    }
    Ok(out)
}
