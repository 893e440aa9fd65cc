//! Compressed-row storage for symmetric matrices with an empty diagonal.

use std::io::Write;

use nalgebra::DMatrix;

/// Both triangles are stored, so every row lists all its nonzeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymCsr {
    /// Builds from upper-triangle triplets `(i, j, v)` with `i < j`, each
    /// pair at most once.
    pub fn from_upper(n: usize, upper: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in upper {
            debug_assert!(i < j && j < n);
            rows[i].push((j, v));
            rows[j].push((i, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries, both triangles.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Upper-triangle entries `(i, j, v)`, `i < j`, in row order.
    pub fn upper(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).filter(move |&(j, _)| j > i).map(move |(j, v)| (i, j, v)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// Same pattern, values replaced by `f(i, j, v)`.
    pub fn map(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.vals[k] = f(i, self.cols[k], self.vals[k]);
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Principal submatrix on `idx` (sorted, distinct), densified.
    pub fn dense_submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (j, v) in self.row(i) {
                if let Ok(b) = idx.binary_search(&j) {
                    m[(a, b)] = v;
                }
            }
        }
        m
    }

    /// Principal submatrix on `idx` (sorted, distinct), renumbered `0..idx.len()`.
    pub fn submatrix(&self, idx: &[usize]) -> SymCsr {
        let upper = idx.iter().enumerate().flat_map(|(a, &i)| {
            self.row(i)
                .filter(move |&(j, _)| j > i)
                .filter_map(move |(j, v)| idx.binary_search(&j).ok().map(|b| (a, b, v)))
        });
        SymCsr::from_upper(idx.len(), upper.collect::<Vec<_>>())
    }

    /// `i j value` per stored entry (both triangles), 17 significant digits.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.16e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_and_access() {
        let m = SymCsr::from_upper(3, [(0, 2, 0.5), (0, 1, 0.25)]);
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(2, 0), 0.5);
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.row(0).collect::<Vec<_>>(), vec![(1, 0.25), (2, 0.5)]);
        assert_eq!(m.upper().count(), 2);
        assert_eq!(m.row_sums(), vec![0.75, 0.25, 0.5]);
        let mut y = vec![0.0; 3];
        m.matvec(&[1.0, 2.0, 4.0], &mut y);
        assert_eq!(y, vec![2.5, 0.25, 0.5]);
        assert_eq!(m.to_dense(), m.to_dense().transpose());
        let sub = m.dense_submatrix(&[0, 2]);
        assert_eq!(sub[(0, 1)], 0.5);
        assert_eq!(m.submatrix(&[0, 2]).to_dense(), sub);
    }

    #[test]
    fn coordinate_dump_has_17_digits() {
        let m = SymCsr::from_upper(2, [(0, 1, 1.0 / 3.0)]);
        let mut buf = Vec::new();
        m.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, "0 1 3.3333333333333331e-1");
        let v: f64 = first.split(' ').nth(2).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }
}
