//! External clustering scores: accuracy under the best label matching,
//! the pair-counting adjusted Rand index and normalized mutual information.

use serde::Serialize;

use crate::{Error, Result};

fn check(t: &[usize], l: &[usize]) -> Result<()> {
    if t.len() != l.len() {
        return Err(Error::LengthMismatch {
            left: t.len(),
            right: l.len(),
        });
    }
    if t.is_empty() {
        return Err(Error::Empty("labelings are empty".into()));
    }
    Ok(())
}

/// Counts `[t][l]`, sized by the largest id of each side plus one.
pub fn contingency(t: &[usize], l: &[usize]) -> Result<Vec<Vec<u64>>> {
    check(t, l)?;
    let rows = t.iter().max().map_or(0, |m| m + 1);
    let cols = l.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; cols]; rows];
    for (&a, &b) in t.iter().zip(l) {
        table[a][b] += 1;
    }
    Ok(table)
}

/// Maximum total weight of a one-to-one row/column matching.
fn max_assignment(weights: &[Vec<u64>]) -> u64 {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    if n == 0 {
        return 0;
    }
    let top = weights.iter().flatten().copied().max().unwrap_or(0) as i64;
    let cost = |i: usize, j: usize| -> i64 {
        let w = if i < rows && j < cols { weights[i][j] as i64 } else { 0 };
        top - w
    };
    // Shortest augmenting path with potentials, 1-based with a virtual
    // column 0.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n)
        .filter(|&j| owner[j] - 1 < rows && j - 1 < cols)
        .map(|j| weights[owner[j] - 1][j - 1])
        .sum()
}

/// Fraction of points whose predicted cluster maps to their true class
/// under the best one-to-one mapping.
pub fn accuracy(t: &[usize], l: &[usize]) -> Result<f64> {
    let table = contingency(t, l)?;
    Ok(max_assignment(&table) as f64 / t.len() as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairCounts {
    /// Same cluster in both.
    pub n11: u64,
    /// Different clusters in both.
    pub n00: u64,
    /// Same in `t`, different in `l`.
    pub n01: u64,
    /// Different in `t`, same in `l`.
    pub n10: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.n11 + self.n00 + self.n01 + self.n10
    }
}

fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

pub fn pair_counts(t: &[usize], l: &[usize]) -> Result<PairCounts> {
    let table = contingency(t, l)?;
    if t.len() < 2 {
        return Err(Error::param("pair counts need at least two points"));
    }
    let same_both: u64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let same_t: u64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let cols = table.first().map_or(0, Vec::len);
    let same_l: u64 = (0..cols).map(|j| pairs(table.iter().map(|r| r[j]).sum())).sum();
    let all = pairs(t.len() as u64);
    Ok(PairCounts {
        n11: same_both,
        n01: same_t - same_both,
        n10: same_l - same_both,
        n00: all + same_both - same_t - same_l,
    })
}

/// `2 (n00 n11 - n01 n10) / ((n00 + n01)(n01 + n11) + (n00 + n10)(n10 + n11))`.
///
/// A zero denominator yields 1 for identical partitions and 0 otherwise.
/// The value is not clamped and can be negative.
pub fn ari_from_counts(c: &PairCounts) -> f64 {
    let (n11, n00, n01, n10) = (c.n11 as i128, c.n00 as i128, c.n01 as i128, c.n10 as i128);
    let num = 2 * (n00 * n11 - n01 * n10);
    let den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if den == 0 {
        return if n01 == 0 && n10 == 0 { 1.0 } else { 0.0 };
    }
    num as f64 / den as f64
}

pub fn ari(t: &[usize], l: &[usize]) -> Result<f64> {
    Ok(ari_from_counts(&pair_counts(t, l)?))
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `I(T; L) / max(H(T), H(L))` with natural logarithms.
pub fn nmi(t: &[usize], l: &[usize]) -> Result<f64> {
    let table = contingency(t, l)?;
    let n = t.len() as f64;
    let row: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols = table.first().map_or(0, Vec::len);
    let col: Vec<u64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let ht = entropy(row.iter().copied(), n);
    let hl = entropy(col.iter().copied(), n);
    if ht == 0.0 && hl == 0.0 {
        return Ok(1.0);
    }
    if ht == 0.0 || hl == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (a, r) in table.iter().enumerate() {
        for (b, &c) in r.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / n * (c * n / (row[a] as f64 * col[b] as f64)).ln();
            }
        }
    }
    Ok((mi / ht.max(hl)).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scores {
    pub acc: f64,
    pub ari: f64,
    pub nmi: f64,
}

pub fn score(t: &[usize], l: &[usize]) -> Result<Scores> {
    Ok(Scores {
        acc: accuracy(t, l)?,
        ari: ari(t, l)?,
        nmi: nmi(t, l)?,
    })
}
