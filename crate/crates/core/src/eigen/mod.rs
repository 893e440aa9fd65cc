//! Leading eigenpairs of the normalized operator `D^-1/2 A D^-1/2`.
//!
//! The operator is block diagonal over the connected components of the
//! graph, so each component is decomposed on its own: densely up to
//! [`EigenOptions::dense_limit`] vertices, with thick-restart Lanczos above.
//! Every component with an edge contributes the eigenvalue 1 exactly, with
//! eigenvector proportional to `sqrt(degree)`. When several components exist
//! that eigenvalue is repeated and its eigenspace gets a fixed basis: first
//! the global `sqrt(degree)` vector, then with components ranked by size,
//! one vector per component `j` contrasting it with the larger ones and
//! vanishing on the smaller ones. Isolated vertices contribute 0.

mod lanczos;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

pub use lanczos::{lanczos_top, LanczosOptions};

use crate::affinity::NormalizedOperator;
use crate::knn_graph::connected_components;
use crate::{Error, Result};

/// Default number of requested eigenpairs, capped by `N`.
pub const DEFAULT_LAMBDA_MAX: usize = 25;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenStrategy {
    /// Dense for components up to `dense_limit` vertices, Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub strategy: EigenStrategy,
    pub dense_limit: usize,
    pub lanczos: LanczosOptions,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            strategy: EigenStrategy::Auto,
            dense_limit: 2000,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Eigenvalues in descending order with unit eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    components: usize,
}

impl EigenSystem {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `N x m`, column `j` belongs to `values()[j]`.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    /// Connected components of the operator's graph (isolated vertices
    /// included).
    pub fn components(&self) -> usize {
        self.components
    }

    /// `||L v_j - lambda_j v_j||_2` per column.
    pub fn residual_norms(&self, op: &NormalizedOperator) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        (0..self.m())
            .map(|j| {
                let v = self.vectors.column(j);
                op.matvec(v.as_slice(), &mut y);
                y.iter()
                    .zip(v.iter())
                    .map(|(a, b)| (a - self.values[j] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Eigenpairs of one component, in local coordinates, descending.
struct LocalPairs {
    members: Vec<usize>,
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

fn decompose_component(
    op: &NormalizedOperator,
    members: Vec<usize>,
    want: usize,
    opts: &EigenOptions,
) -> Result<LocalPairs> {
    let size = members.len();
    let dense = match opts.strategy {
        EigenStrategy::Dense => true,
        EigenStrategy::Lanczos => false,
        EigenStrategy::Auto => size <= opts.dense_limit,
    };
    let (values, vectors) = if dense {
        let eig = SymmetricEigen::new(op.matrix().dense_submatrix(&members));
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        order.truncate(want);
        (
            order.iter().map(|&c| eig.eigenvalues[c]).collect(),
            order
                .iter()
                .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
                .collect(),
        )
    } else {
        let sub = op.matrix().submatrix(&members);
        lanczos_top(size, want, |x, y| sub.matvec(x, y), &opts.lanczos)?
    };
    Ok(LocalPairs {
        members,
        values,
        vectors,
    })
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Largest-magnitude entry positive; the first index wins ties.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn decompose(op: &NormalizedOperator, m: usize) -> Result<EigenSystem> {
    decompose_with(op, m, &EigenOptions::default())
}

/// Top `m` eigenpairs by descending eigenvalue.
pub fn decompose_with(op: &NormalizedOperator, m: usize, opts: &EigenOptions) -> Result<EigenSystem> {
    let n = op.n();
    if m == 0 || m > n {
        return Err(Error::param(format!(
            "requested {m} eigenpairs of a {n}-vertex operator"
        )));
    }
    let comp = connected_components(n, |i| op.matrix().row(i).map(|(j, _)| j));
    let count = comp.iter().max().map_or(0, |c| c + 1);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, &c) in comp.iter().enumerate() {
        groups[c].push(i);
    }
    // Largest first, then by smallest member (groups are already in that
    // order for equal sizes).
    groups.sort_by_key(|g| std::cmp::Reverse(g.len()));

    let sqrt_deg: Vec<f64> = op.degrees().iter().map(|d| d.sqrt()).collect();
    let mut unit_block: Vec<Vec<usize>> = Vec::new();
    // (value, group rank, local rank, component index, local vector)
    let mut rest: Vec<(f64, usize, usize, usize, Vec<f64>)> = Vec::new();
    let mut locals: Vec<LocalPairs> = Vec::new();

    for (rank, members) in groups.into_iter().enumerate() {
        if members.len() == 1 {
            rest.push((0.0, rank, 0, locals.len(), vec![1.0]));
            locals.push(LocalPairs {
                members,
                values: vec![],
                vectors: vec![],
            });
            continue;
        }
        let want = m.min(members.len());
        let mut pairs = decompose_component(op, members, want, opts)?;
        // The top pair is exactly (1, sqrt(d)); the rest are re-orthogonalized
        // against it.
        let mut top: Vec<f64> = pairs.members.iter().map(|&i| sqrt_deg[i]).collect();
        normalize(&mut top);
        for (local, (val, vec)) in pairs.values.iter().zip(pairs.vectors.iter_mut()).enumerate().skip(1) {
            let proj: f64 = vec.iter().zip(&top).map(|(a, b)| a * b).sum();
            vec.iter_mut().zip(&top).for_each(|(a, b)| *a -= proj * b);
            normalize(vec);
            rest.push((*val, rank, local, locals.len(), vec.clone()));
        }
        unit_block.push(pairs.members.clone());
        pairs.vectors.truncate(1);
        pairs.vectors[0] = top;
        locals.push(pairs);
    }

    let mut columns: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m);

    // Basis of the eigenvalue-1 space in coefficient coordinates over the
    // components, largest first. With s_c = sqrt(vol_c / vol) the first
    // vector is s itself; vector j contrasts component j with components
    // 0..j and vanishes on the smaller ones.
    let k = unit_block.len();
    let unit_locals: Vec<&LocalPairs> = locals.iter().filter(|l| l.members.len() > 1).collect();
    let mut coeff_basis: Vec<Vec<f64>> = Vec::new();
    if k > 0 {
        let mut s: Vec<f64> = unit_block
            .iter()
            .map(|members| members.iter().map(|&i| op.degrees()[i]).sum::<f64>().sqrt())
            .collect();
        normalize(&mut s);
        coeff_basis.push(s.clone());
        let mut head = 0.0;
        for j in 1..k.min(m) {
            head += s[j - 1] * s[j - 1];
            let mut x = vec![0.0; k];
            x[..j].copy_from_slice(&s[..j]);
            x[j] = -head / s[j];
            normalize(&mut x);
            coeff_basis.push(x);
        }
    }
    for coeffs in &coeff_basis {
        let mut v = vec![0.0; n];
        for (c, local) in unit_locals.iter().enumerate() {
            for (&i, &x) in local.members.iter().zip(&local.vectors[0]) {
                v[i] += coeffs[c] * x;
            }
        }
        columns.push((1.0, v));
    }

    rest.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (val, _, _, comp_idx, local) in rest.into_iter().take(m.saturating_sub(columns.len())) {
        let mut v = vec![0.0; n];
        for (&i, &x) in locals[comp_idx].members.iter().zip(&local) {
            v[i] = x;
        }
        columns.push((val, v));
    }
    debug_assert_eq!(columns.len(), m);

    let mut vectors = DMatrix::zeros(n, m);
    let mut values = Vec::with_capacity(m);
    for (j, (val, mut v)) in columns.into_iter().enumerate() {
        fix_sign(&mut v);
        vectors.set_column(j, &nalgebra::DVector::from_vec(v));
        values.push(val);
    }
    Ok(EigenSystem {
        values,
        vectors,
        components: count,
    })
}
