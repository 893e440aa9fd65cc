//! Thick-restart Lanczos with full reorthogonalization for the largest
//! algebraic eigenpairs of a symmetric operator.
//!
//! A single start vector only sees one direction of an exactly repeated
//! eigenvalue; callers split disconnected operators into components first.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::rng::{rng_for, stream};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Convergence when `|beta * s_last| <= tol * max(1, |theta|)`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Krylov basis size; `None` picks `max(2m + 10, m + 20)`.
    pub basis: Option<usize>,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_restarts: 2000,
            basis: None,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of classical Gram-Schmidt against `basis`; returns the summed
/// coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut total = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (q, t) in basis.iter().zip(total.iter_mut()) {
            let c = dot(q, w);
            axpy(-c, q, w);
            *t += c;
        }
    }
    total
}

/// Unit vector orthogonal to `basis`, or `None` if the basis already spans
/// the space.
fn fresh_direction(basis: &[Vec<f64>], n: usize, rng: &mut impl rand::Rng) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        orthogonalize(basis, &mut v);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Top `m` eigenpairs of the `n`-dimensional operator `apply`, eigenvalues
/// descending.
pub fn lanczos_top<F>(n: usize, m: usize, apply: F, opts: &LanczosOptions) -> Result<(Vec<f64>, Vec<Vec<f64>>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    if m == 0 || m > n {
        return Err(Error::param(format!(
            "cannot compute {m} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let p = opts
        .basis
        .unwrap_or((2 * m + 10).max(m + 20))
        .clamp(m + 1, n.max(m + 1))
        .min(n);
    let mut rng = rng_for(opts.seed, stream::LANCZOS);

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
    q.push(fresh_direction(&[], n, &mut rng).expect("n >= 1"));
    let mut t = DMatrix::<f64>::zeros(p, p);
    let mut start = 0;
    let mut w = vec![0.0; n];
    let mut last_residuals = Vec::new();

    for _restart in 0..=opts.max_restarts {
        // Expand the basis from `start` up to `p` vectors.
        let mut size = p;
        let mut beta = 0.0;
        let mut resid: Option<Vec<f64>> = None;
        for j in start..p {
            apply(&q[j], &mut w);
            let coeffs = orthogonalize(&q[..=j], &mut w);
            for (i, &c) in coeffs.iter().enumerate() {
                t[(i, j)] = c;
                t[(j, i)] = c;
            }
            beta = norm(&w);
            let scale = coeffs.iter().fold(1.0f64, |a, c| a.max(c.abs()));
            let next = if beta > 1e-12 * scale {
                Some(w.iter().map(|x| x / beta).collect::<Vec<_>>())
            } else {
                beta = 0.0;
                fresh_direction(&q, n, &mut rng)
            };
            if j + 1 == p {
                resid = next;
                break;
            }
            match next {
                Some(v) => {
                    t[(j + 1, j)] = beta;
                    t[(j, j + 1)] = beta;
                    q.push(v);
                }
                None => {
                    // Krylov space exhausted the whole space: T is exact.
                    size = j + 1;
                    beta = 0.0;
                    break;
                }
            }
        }

        let tt = t.view((0, 0), (size, size)).into_owned();
        let eig = SymmetricEigen::new(tt);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let residual = |col: usize| (beta * eig.eigenvectors[(size - 1, col)]).abs();
        last_residuals = order[..m].iter().map(|&c| residual(c)).collect();
        let converged = order[..m]
            .iter()
            .all(|&c| residual(c) <= opts.tol * eig.eigenvalues[c].abs().max(1.0));

        let ritz = |cols: &[usize]| -> Vec<Vec<f64>> {
            cols.iter()
                .map(|&c| {
                    let mut y = vec![0.0; n];
                    for (i, qi) in q[..size].iter().enumerate() {
                        axpy(eig.eigenvectors[(i, c)], qi, &mut y);
                    }
                    y
                })
                .collect()
        };

        if converged || size < p || resid.is_none() {
            let values = order[..m].iter().map(|&c| eig.eigenvalues[c]).collect();
            return Ok((values, ritz(&order[..m])));
        }

        // Thick restart: keep the leading Ritz vectors plus the residual.
        let keep = (m + (p - m) / 2).min(p - 1);
        let kept = ritz(&order[..keep]);
        t.fill(0.0);
        for (l, &c) in order[..keep].iter().enumerate() {
            t[(l, l)] = eig.eigenvalues[c];
            let coupling = beta * eig.eigenvectors[(size - 1, c)];
            t[(keep, l)] = coupling;
            t[(l, keep)] = coupling;
        }
        q = kept;
        let mut r = resid.expect("checked above");
        orthogonalize(&q, &mut r);
        let nr = norm(&r);
        r.iter_mut().for_each(|x| *x /= nr);
        q.push(r);
        start = keep;
    }

    let worst_residual = last_residuals.iter().copied().fold(0.0, f64::max);
    Err(Error::NotConverged {
        iterations: opts.max_restarts,
        worst_residual,
        residuals: last_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_apply(a: &DMatrix<f64>) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |x, y| {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = (0..x.len()).map(|j| a[(i, j)] * x[j]).sum();
            }
        }
    }

    #[test]
    fn diagonal_operator() {
        let n = 200;
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { (i as f64 / n as f64).sin() } else { 0.0 });
        let (vals, vecs) = lanczos_top(n, 5, dense_apply(&a), &LanczosOptions::default()).unwrap();
        let mut expect: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64).sin()).collect();
        expect.sort_by(|a, b| b.total_cmp(a));
        for (v, e) in vals.iter().zip(&expect) {
            assert!((v - e).abs() < 1e-9, "{v} vs {e}");
        }
        assert!((norm(&vecs[0]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_operator_uses_full_basis() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let (vals, _) = lanczos_top(3, 3, dense_apply(&a), &LanczosOptions::default()).unwrap();
        let s = 2f64.sqrt();
        for (v, e) in vals.iter().zip([2.0 + s, 2.0, 2.0 - s]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_counts() {
        let a = DMatrix::<f64>::identity(3, 3);
        assert!(lanczos_top(3, 4, dense_apply(&a), &LanczosOptions::default()).is_err());
        assert!(lanczos_top(3, 0, dense_apply(&a), &LanczosOptions::default()).is_err());
    }
}
