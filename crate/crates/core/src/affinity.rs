//! Locally scaled affinities on the refined graph and the symmetric
//! normalized operator `D^-1/2 A D^-1/2`.

use crate::knn_graph::{NeighborTable, RefinedGraph};
use crate::sparse::SymCsr;
use crate::{Error, Result};

pub const DEFAULT_SCALE_K: usize = 7;

/// Raw local scale of each point: its distance to the `scale_k`-th nearest
/// neighbor in the unrefined table. Zero when `scale_k` duplicates exist.
pub fn local_scales(nt: &NeighborTable, scale_k: usize) -> Result<Vec<f64>> {
    if scale_k == 0 || scale_k > nt.k_max() {
        return Err(Error::param(format!(
            "scale_k must lie in 1..={}, got {scale_k}",
            nt.k_max()
        )));
    }
    Ok((0..nt.len()).map(|i| nt.dists(i)[scale_k - 1]).collect())
}

/// Replaces zero scales by the smallest positive distance in the point's row,
/// or by machine epsilon if the whole row is zero. Returns the indices that
/// were replaced.
pub fn regularize_scales(nt: &NeighborTable, scales: &mut [f64]) -> Vec<usize> {
    let mut replaced = Vec::new();
    for (i, s) in scales.iter_mut().enumerate() {
        if *s > 0.0 {
            continue;
        }
        *s = nt.dists(i).iter().copied().find(|&d| d > 0.0).unwrap_or(f64::EPSILON);
        replaced.push(i);
    }
    replaced
}

/// `A_ij = exp(-d_ij^2 / (sigma_i sigma_j))` on refined edges, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityMatrix {
    matrix: SymCsr,
    local_scales: Vec<f64>,
}

impl AffinityMatrix {
    /// Wraps arbitrary non-negative symmetric weights (used for constructed
    /// operators in tests and tools).
    pub fn from_weights(matrix: SymCsr) -> Result<Self> {
        if let Some((i, j, v)) = matrix.upper().find(|&(_, _, v)| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::param(format!(
                "affinity ({i}, {j}) = {v} is not a non-negative real"
            )));
        }
        let n = matrix.n();
        Ok(Self {
            matrix,
            local_scales: vec![f64::NAN; n],
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &SymCsr {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn local_scales(&self) -> &[f64] {
        &self.local_scales
    }
}

pub fn build_affinity(g: &RefinedGraph, scales: &[f64]) -> Result<AffinityMatrix> {
    if scales.len() != g.n() {
        return Err(Error::LengthMismatch {
            left: scales.len(),
            right: g.n(),
        });
    }
    if let Some(i) = scales.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::param(format!(
            "local scale of point {i} is {} (must be positive)",
            scales[i]
        )));
    }
    let matrix = SymCsr::from_upper(
        g.n(),
        g.edges()
            .iter()
            .map(|e| (e.i, e.j, (-(e.dist * e.dist) / (scales[e.i] * scales[e.j])).exp())),
    );
    Ok(AffinityMatrix {
        matrix,
        local_scales: scales.to_vec(),
    })
}

/// `D^-1/2 A D^-1/2`; rows of zero-degree vertices stay zero.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedOperator {
    matrix: SymCsr,
    degrees: Vec<f64>,
}

impl NormalizedOperator {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &SymCsr {
        &self.matrix
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.matvec(x, y);
    }
}

pub fn normalized_operator(a: &AffinityMatrix) -> NormalizedOperator {
    let degrees = a.matrix.row_sums();
    let matrix = a.matrix.map(|i, j, v| {
        let dd = degrees[i] * degrees[j];
        if dd > 0.0 {
            v / dd.sqrt()
        } else {
            0.0
        }
    });
    NormalizedOperator { matrix, degrees }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn_graph::Edge;

    fn nt_row(row: &[f64]) -> NeighborTable {
        // Every one of the k + 1 points sees the same distance row.
        let k = row.len();
        let n = k + 1;
        let mut ids = Vec::new();
        let mut dists = Vec::new();
        for i in 0..n {
            ids.extend((0..n).filter(|&j| j != i));
            dists.extend_from_slice(row);
        }
        NeighborTable::from_rows(k, ids, dists).unwrap()
    }

    #[test]
    fn scale_is_kth_distance() {
        let nt = nt_row(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(local_scales(&nt, 7).unwrap()[0], 7.0);
        assert!(local_scales(&nt, 9).is_err());
        assert!(local_scales(&nt, 0).is_err());
    }

    #[test]
    fn duplicate_points_give_degenerate_scale() {
        let nt = nt_row(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        let mut s = local_scales(&nt, 7).unwrap();
        assert_eq!(s[0], 0.0);
        let replaced = regularize_scales(&nt, &mut s);
        assert_eq!(replaced.len(), s.len());
        assert_eq!(s[0], 0.5);

        let nt = nt_row(&[0.0; 7]);
        let mut s = local_scales(&nt, 7).unwrap();
        regularize_scales(&nt, &mut s);
        assert_eq!(s[0], f64::EPSILON);
    }

    fn pair_graph(dist: f64) -> RefinedGraph {
        RefinedGraph::from_edges(2, vec![Edge { i: 0, j: 1, dist }], vec![1, 1])
    }

    #[test]
    fn closed_form_weights() {
        let a = build_affinity(&pair_graph(0.0), &[0.3, 2.0]).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        let a = build_affinity(&pair_graph(1.0), &[1.0, 1.0]).unwrap();
        assert!((a.get(1, 0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(a.get(0, 0), 0.0);
        assert!(build_affinity(&pair_graph(1.0), &[0.0, 1.0]).is_err());
        assert!(build_affinity(&pair_graph(1.0), &[1.0]).is_err());
    }

    #[test]
    fn operator_on_single_edge_and_isolated_vertex() {
        let w = SymCsr::from_upper(3, [(0, 1, 0.5)]);
        let op = normalized_operator(&AffinityMatrix::from_weights(w).unwrap());
        assert_eq!(op.degrees(), &[0.5, 0.5, 0.0]);
        assert_eq!(op.matrix().get(0, 1), 1.0);
        assert!(op.matrix().row(2).next().is_none());
        assert!(AffinityMatrix::from_weights(SymCsr::from_upper(2, [(0, 1, -1.0)])).is_err());
    }
}
