//! Point sets: the single ingestion surface of the crate.
//!
//! A [`PointSet`] is loaded from CSV ([`load_csv`]), produced by one of the
//! synthetic generators ([`generate`]), or derived from another point set by
//! [`inject_noise`] / [`PointSet::standardized`].

mod csv_io;
mod generate;
mod spec;

pub use csv_io::{detect_label_column, load_csv, parse_csv, parse_labels, write_csv, write_labels};
pub use generate::{generate, inject_noise, BlobsParams, LinesParams, RingsParams, Shape, SparseBlobsParams};
pub use spec::GeneratorSpec;

use crate::{Error, Result};

/// N points in d dimensions, stored row-major, with optional ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    name: String,
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<usize>>,
    noise_label: Option<usize>,
}

impl PointSet {
    /// Validates shape, finiteness and label contiguity.
    pub fn new(name: impl Into<String>, dim: usize, coords: Vec<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPointSet("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidPointSet("point set has no points".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidPointSet(format!(
                "{} coordinates do not divide into rows of {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPointSet(format!(
                "non-finite coordinate at point {}, dimension {}",
                pos / dim,
                pos % dim
            )));
        }
        let n = coords.len() / dim;
        if let Some(labels) = &labels {
            validate_labels(labels, n)?;
        }
        Ok(Self {
            name: name.into(),
            dim,
            coords,
            labels,
            noise_label: None,
        })
    }

    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>], labels: Option<Vec<usize>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidPointSet("rows have unequal length".into()));
        }
        Self::new(name, dim, rows.concat(), labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Label carried by injected noise points, if any were added.
    pub fn noise_label(&self) -> Option<usize> {
        self.noise_label
    }

    /// Number of distinct ground-truth classes (noise included).
    pub fn class_count(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Classes that are not the noise class.
    pub fn structure_class_count(&self) -> Option<usize> {
        self.class_count().map(|c| c - usize::from(self.noise_label.is_some()))
    }

    /// Per-dimension `(min, max)`.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.points() {
            for (b, &v) in bounds.iter_mut().zip(p) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        bounds
    }

    /// Zero mean and unit variance per dimension. Constant dimensions are
    /// only centered.
    pub fn standardized(&self) -> PointSet {
        let n = self.len() as f64;
        let mut coords = self.coords.clone();
        for d in 0..self.dim {
            let mean = self.points().map(|p| p[d]).sum::<f64>() / n;
            let var = self.points().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            for row in coords.chunks_exact_mut(self.dim) {
                row[d] -= mean;
                if sd > 0.0 {
                    row[d] /= sd;
                }
            }
        }
        PointSet { coords, ..self.clone() }
    }

    /// Declares `label` as the noise class, e.g. after reloading a CSV
    /// written from a noisy point set.
    pub fn with_noise_class(self, label: usize) -> Result<Self> {
        match self.class_count() {
            Some(c) if label < c => Ok(self.with_noise_label(label)),
            Some(c) => Err(Error::param(format!(
                "noise label {label} is not one of the {c} classes"
            ))),
            None => Err(Error::param("a noise class needs ground-truth labels")),
        }
    }

    pub(crate) fn with_noise_label(mut self, label: usize) -> Self {
        self.noise_label = Some(label);
        self
    }
}

fn validate_labels(labels: &[usize], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::InvalidPointSet(format!(
            "{} labels for {n} points",
            labels.len()
        )));
    }
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut used = vec![false; classes];
    for &l in labels {
        used[l] = true;
    }
    if let Some(missing) = used.iter().position(|u| !u) {
        return Err(Error::InvalidPointSet(format!(
            "label ids must be contiguous; id {missing} is unused"
        )));
    }
    Ok(())
}

/// Maps arbitrary label tokens to contiguous ids. Integer tokens keep their
/// numeric order; anything else is numbered by first appearance.
pub(crate) fn encode_labels(tokens: &[String]) -> Vec<usize> {
    use std::collections::HashMap;
    let ints: Option<Vec<i64>> = tokens.iter().map(|t| t.parse::<i64>().ok()).collect();
    match ints {
        Some(ints) => {
            let mut distinct = ints.clone();
            distinct.sort_unstable();
            distinct.dedup();
            ints.iter()
                .map(|v| distinct.binary_search(v).expect("value present"))
                .collect()
        }
        None => {
            let mut ids: HashMap<&str, usize> = HashMap::new();
            tokens
                .iter()
                .map(|t| {
                    let next = ids.len();
                    *ids.entry(t.as_str()).or_insert(next)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        assert!(PointSet::new("x", 2, vec![0.0, f64::NAN], None).is_err());
        assert!(PointSet::new("x", 0, vec![], None).is_err());
        assert!(PointSet::new("x", 2, vec![0.0, 1.0, 2.0], None).is_err());
        assert!(PointSet::new("x", 1, vec![], None).is_err());
    }

    #[test]
    fn labels_must_be_contiguous_and_sized() {
        assert!(PointSet::new("x", 1, vec![0.0, 1.0], Some(vec![0, 2])).is_err());
        assert!(PointSet::new("x", 1, vec![0.0, 1.0], Some(vec![0])).is_err());
        let ps = PointSet::new("x", 1, vec![0.0, 1.0], Some(vec![1, 0])).unwrap();
        assert_eq!(ps.class_count(), Some(2));
    }

    #[test]
    fn label_encoding() {
        let s = |v: &[&str]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        assert_eq!(encode_labels(&s(&["a", "b", "a"])), vec![0, 1, 0]);
        assert_eq!(encode_labels(&s(&["b", "a"])), vec![0, 1]);
        assert_eq!(encode_labels(&s(&["7", "3", "7", "-1"])), vec![2, 1, 2, 0]);
    }

    #[test]
    fn standardize_gives_zero_mean_unit_variance() {
        let ps = PointSet::from_rows("s", &[vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]], None).unwrap();
        let z = ps.standardized();
        let col0: Vec<f64> = z.points().map(|p| p[0]).collect();
        let mean = col0.iter().sum::<f64>() / 3.0;
        let var = col0.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
        assert!(z.points().all(|p| p[1] == 0.0));
    }
}
