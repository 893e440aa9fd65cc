//! All-pairs neighbor search and a line-by-line refined graph.

use std::collections::BTreeSet;

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// For each point, every other point sorted by (distance, index).
pub fn sorted_neighbors(points: &[f64], dim: usize) -> Vec<Vec<(f64, usize)>> {
    let n = points.len() / dim;
    let p = |i: usize| &points[i * dim..(i + 1) * dim];
    (0..n)
        .map(|i| {
            let mut row: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (distance(p(i), p(j)), j)).collect();
            row.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            row
        })
        .collect()
}

/// `k` nearest neighbors per point by scanning all pairs.
pub fn knn(points: &[f64], dim: usize, k: usize) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    let rows = sorted_neighbors(points, dim);
    let ids = rows.iter().map(|r| r[..k].iter().map(|x| x.1).collect()).collect();
    let dists = rows.iter().map(|r| r[..k].iter().map(|x| x.0).collect()).collect();
    (ids, dists)
}

/// Mean plus population standard deviation of `xs[..j]` for every `j`,
/// each prefix evaluated from scratch with a two-pass formula.
pub fn prefix_mean_plus_std(xs: &[f64]) -> Vec<f64> {
    (1..=xs.len())
        .map(|j| {
            let prefix = &xs[..j];
            let mean = prefix.iter().sum::<f64>() / j as f64;
            let var = prefix.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / j as f64;
            mean + var.sqrt()
        })
        .collect()
}

/// Adaptive neighbor cut and mutual agreement, written out directly:
/// neighbor `j` of `i` survives when the running statistic at `j` does not
/// exceed the one at `baseline`; an undirected edge needs both directions.
/// Returns sorted `(i, j)` pairs with `i < j`, and the per-point survivor
/// counts.
pub fn refined_edges(points: &[f64], dim: usize, k_max: usize, baseline: usize) -> (Vec<(usize, usize)>, Vec<usize>) {
    let (ids, dists) = knn(points, dim, k_max);
    let n = ids.len();
    let mut directed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut counts = vec![0; n];
    for i in 0..n {
        let dm = prefix_mean_plus_std(&dists[i]);
        let threshold = dm[baseline - 1];
        for j in 0..k_max {
            if dm[j] <= threshold {
                directed[i].insert(ids[i][j]);
                counts[i] += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for &j in &directed[i] {
            if i < j && directed[j].contains(&i) {
                edges.push((i, j));
            }
        }
    }
    edges.sort();
    (edges, counts)
}

/// Component id per vertex from an edge list, numbered by smallest member.
pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if ids[r] == usize::MAX {
            ids[r] = next;
            next += 1;
        }
        out[v] = ids[r];
    }
    out
}
