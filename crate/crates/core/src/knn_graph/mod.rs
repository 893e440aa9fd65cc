//! The refined k-nearest-neighbor graph.
//!
//! [`build_neighbor_table`] finds the exact `k_max` nearest neighbors of every
//! point. [`refine_edges`] then keeps, per point, the neighbors whose running
//! distance statistic `mean + std` stays at or below the statistic of the
//! first `baseline_n` neighbors, and [`mutual_filter`] keeps an undirected
//! edge only when both endpoints kept each other.

mod export;
mod kdtree;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::PointSet;
use crate::{Error, Result};

pub use export::{read_edge_list, write_edge_list, GraphSummary};

pub const DEFAULT_BASELINE_N: usize = 7;

/// `min(N - 1, max(3 * baseline_n, 30))`.
pub fn default_k_max(n: usize, baseline_n: usize) -> usize {
    n.saturating_sub(1).min((3 * baseline_n).max(30))
}

/// Per point, the `k_max` nearest other points sorted by ascending distance
/// (ties by smaller index).
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborTable {
    k_max: usize,
    ids: Vec<usize>,
    dists: Vec<f64>,
}

impl NeighborTable {
    /// Builds a table from raw rows, checking the ordering invariants.
    pub fn from_rows(k_max: usize, ids: Vec<usize>, dists: Vec<f64>) -> Result<Self> {
        if k_max == 0 || ids.len() != dists.len() || !ids.len().is_multiple_of(k_max) {
            return Err(Error::param("neighbor table rows must all have k_max entries"));
        }
        let n = ids.len() / k_max;
        for i in 0..n {
            let row_ids = &ids[i * k_max..(i + 1) * k_max];
            let row = &dists[i * k_max..(i + 1) * k_max];
            if row_ids.iter().any(|&j| j == i || j >= n) {
                return Err(Error::param(format!("row {i} has an invalid neighbor id")));
            }
            if row.iter().any(|d| !d.is_finite() || *d < 0.0) || row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::param(format!(
                    "row {i} distances are not sorted non-negative reals"
                )));
            }
        }
        Ok(Self { k_max, ids, dists })
    }

    pub fn len(&self) -> usize {
        self.ids.len() / self.k_max
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn ids(&self, i: usize) -> &[usize] {
        &self.ids[i * self.k_max..(i + 1) * self.k_max]
    }

    pub fn dists(&self, i: usize) -> &[f64] {
        &self.dists[i * self.k_max..(i + 1) * self.k_max]
    }
}

/// Exact k-nn table through a kd-tree (`O(d N log N)` construction).
pub fn build_neighbor_table(ps: &PointSet, k_max: usize) -> Result<NeighborTable> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::param(format!(
            "need at least 2 points for a neighbor table, got {n}"
        )));
    }
    if k_max == 0 || k_max >= n {
        return Err(Error::param(format!("k_max must lie in 1..{n}, got {k_max}")));
    }
    let tree = kdtree::KdTree::build(ps.coords(), ps.dim());
    let rows: Vec<Vec<kdtree::Candidate>> = (0..n)
        .into_par_iter()
        .map(|i| tree.nearest(ps.point(i), k_max, Some(i)))
        .collect();
    let mut ids = Vec::with_capacity(n * k_max);
    let mut dists = Vec::with_capacity(n * k_max);
    for row in rows {
        for c in row {
            ids.push(c.idx);
            dists.push(c.d2.sqrt());
        }
    }
    Ok(NeighborTable { k_max, ids, dists })
}

/// `out[j] = mean(row[..=j]) + std(row[..=j])` with the population standard
/// deviation, accumulated with Welford's update.
pub fn running_threshold(row: &[f64]) -> Vec<f64> {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    row.iter()
        .enumerate()
        .map(|(j, &x)| {
            let count = (j + 1) as f64;
            let delta = x - mean;
            mean += delta / count;
            m2 += delta * (x - mean);
            mean + (m2.max(0.0) / count).sqrt()
        })
        .collect()
}

/// Directed edges that survived the adaptive cut, before mutuality.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedEdges {
    /// Per point, surviving `(neighbor, distance)` in table order.
    pub out: Vec<Vec<(usize, f64)>>,
    /// Number of surviving directed edges per point.
    pub adaptive_k: Vec<usize>,
}

/// Keeps neighbor `j` of point `i` iff `threshold[j] <= threshold[baseline_n]`
/// (1-based positions). Positions before `baseline_n` are tested too.
pub fn refine_edges(nt: &NeighborTable, baseline_n: usize) -> Result<DirectedEdges> {
    if baseline_n < 2 {
        return Err(Error::param(format!("baseline_n must be at least 2, got {baseline_n}")));
    }
    if baseline_n > nt.k_max() {
        return Err(Error::param(format!(
            "baseline_n {baseline_n} exceeds k_max {}",
            nt.k_max()
        )));
    }
    let out: Vec<Vec<(usize, f64)>> = (0..nt.len())
        .into_par_iter()
        .map(|i| {
            let dists = nt.dists(i);
            let dm = running_threshold(dists);
            let cut = dm[baseline_n - 1];
            nt.ids(i)
                .iter()
                .zip(dists)
                .zip(&dm)
                .filter(|(_, &t)| t <= cut)
                .map(|((&j, &d), _)| (j, d))
                .collect()
        })
        .collect();
    let adaptive_k = out.iter().map(Vec::len).collect();
    Ok(DirectedEdges { out, adaptive_k })
}

/// Undirected weighted edge, `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub dist: f64,
}

/// Symmetric sparse graph over all input points. Isolated vertices stay in.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedGraph {
    n: usize,
    edges: Vec<Edge>,
    adaptive_k: Vec<usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// Keeps `(i, j)` iff both `i -> j` and `j -> i` survived refinement.
pub fn mutual_filter(directed: &DirectedEdges) -> RefinedGraph {
    let n = directed.out.len();
    let mut sorted: Vec<Vec<usize>> = directed
        .out
        .iter()
        .map(|row| row.iter().map(|&(j, _)| j).collect())
        .collect();
    sorted.par_iter_mut().for_each(|r| r.sort_unstable());

    let mut edges: Vec<Edge> = directed
        .out
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, row)| {
            let sorted = &sorted;
            row.iter()
                .filter(move |&&(j, _)| i < j && sorted[j].binary_search(&i).is_ok())
                .map(move |&(j, dist)| Edge { i, j, dist })
        })
        .collect();
    edges.sort_by_key(|a| (a.i, a.j));
    RefinedGraph::from_edges(n, edges, directed.adaptive_k.clone())
}

impl RefinedGraph {
    /// Runs the whole construction: table, refinement, mutuality.
    pub fn build(ps: &PointSet, k_max: usize, baseline_n: usize) -> Result<Self> {
        let nt = build_neighbor_table(ps, k_max)?;
        Ok(mutual_filter(&refine_edges(&nt, baseline_n)?))
    }

    /// `edges` must have `i < j`, no duplicates, and ids below `n`.
    pub fn from_edges(n: usize, edges: Vec<Edge>, adaptive_k: Vec<usize>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            debug_assert!(e.i < e.j && e.j < n);
            adjacency[e.i].push((e.j, e.dist));
            adjacency[e.j].push((e.i, e.dist));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
        }
        Self {
            n,
            edges,
            adaptive_k,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adaptive_k(&self) -> &[usize] {
        &self.adaptive_k
    }

    /// Sorted `(neighbor, distance)` pairs of vertex `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search_by_key(&j, |&(k, _)| k).is_ok()
    }

    pub fn isolated(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.adjacency[i].is_empty()).collect()
    }

    /// Connected-component id per vertex, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        connected_components(self.n, |i| self.adjacency[i].iter().map(|&(j, _)| j))
    }

    pub fn summary(&self) -> Result<GraphSummary> {
        GraphSummary::of(self)
    }
}

/// Percentage of the `n(n-1)/2` possible undirected edges present in `g`.
pub fn edge_percentage(g: &RefinedGraph) -> Result<f64> {
    if g.n() < 2 {
        return Err(Error::param("edge percentage needs at least 2 vertices"));
    }
    let n = g.n() as f64;
    Ok(100.0 * g.edge_count() as f64 / (n * (n - 1.0) / 2.0))
}

pub(crate) fn connected_components<I>(n: usize, neighbors: impl Fn(usize) -> I) -> Vec<usize>
where
    I: Iterator<Item = usize>,
{
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for w in neighbors(v) {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[f64]]) -> NeighborTable {
        let n = rows.len().max(rows[0].len() + 1);
        let k = rows[0].len();
        let mut ids = Vec::new();
        let mut dists = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            ids.extend((0..n).filter(|&j| j != i).take(k));
            dists.extend_from_slice(r);
        }
        NeighborTable { k_max: k, ids, dists }
    }

    #[test]
    fn hand_geometry_row() {
        let ps = PointSet::from_rows("p", &[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]], None).unwrap();
        let nt = build_neighbor_table(&ps, 2).unwrap();
        assert_eq!(nt.ids(0), &[1, 2]);
        assert_eq!(nt.dists(0), &[1.0, 3.0]);
    }

    #[test]
    fn duplicate_tie_broken_by_index() {
        let ps = PointSet::from_rows("p", &[vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]], None).unwrap();
        let nt = build_neighbor_table(&ps, 1).unwrap();
        assert_eq!(nt.ids(0), &[1]);
        assert_eq!(nt.dists(0), &[0.0]);
        assert_eq!(nt.ids(1), &[0]);
    }

    #[test]
    fn table_errors() {
        let ps = PointSet::from_rows("p", &[vec![0.0], vec![1.0]], None).unwrap();
        assert!(build_neighbor_table(&ps, 2).is_err());
        assert!(build_neighbor_table(&ps, 0).is_err());
        let one = PointSet::from_rows("p", &[vec![0.0]], None).unwrap();
        assert!(build_neighbor_table(&one, 1).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!(running_threshold(&[1.0; 10]).iter().all(|&v| v == 1.0));
        assert_eq!(running_threshold(&[1.0, 3.0])[1], 3.0);
        assert_eq!(running_threshold(&[2.0])[0], 2.0);
    }

    #[test]
    fn threshold_matches_prefix_loops() {
        use rand::Rng;
        let mut rng = crate::rng::rng_for(5, 0);
        let mut row: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..4.0)).collect();
        row.sort_by(f64::total_cmp);
        let got = running_threshold(&row);
        for j in 0..row.len() {
            let prefix = &row[..=j];
            let m = prefix.iter().sum::<f64>() / prefix.len() as f64;
            let v = prefix.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / prefix.len() as f64;
            assert!((got[j] - (m + v.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn eighth_neighbor_cut() {
        let mut row = vec![1.0; 7];
        row.extend([1.05, 1.05, 1.1]);
        let dm = running_threshold(&row);
        assert_eq!(dm[6], 1.0);
        // mean 1.00625, population std ~0.01654
        assert!((dm[7] - (1.00625 + 0.016535945694153692)).abs() < 1e-12);
        let r = refine_edges(&table(&[&row]), 7).unwrap();
        assert_eq!(r.adaptive_k, vec![7]);
    }

    #[test]
    fn constant_row_keeps_everything() {
        let r = refine_edges(&table(&[&[1.0; 20]]), 7).unwrap();
        assert_eq!(r.adaptive_k, vec![20]);
    }

    #[test]
    fn early_positions_can_be_removed() {
        // One close neighbor followed by a plateau: the statistic peaks near
        // position 7 and then decays, so with a later baseline the middle of
        // the row exceeds the cut while its head and tail do not.
        let mut row = vec![0.0];
        row.extend([1.0; 19]);
        let baseline = 12;
        let prefix_stat = |j: usize| {
            let p = &row[..j];
            let m = p.iter().sum::<f64>() / j as f64;
            m + (p.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / j as f64).sqrt()
        };
        let cut = prefix_stat(baseline);
        let expected: Vec<usize> = (1..=20).filter(|&j| prefix_stat(j) <= cut).collect();
        assert_eq!(expected, vec![1, 2, 3, 4, 12, 13, 14, 15, 16, 17, 18, 19, 20]);

        let r = refine_edges(&table(&[&row]), baseline).unwrap();
        assert_eq!(r.adaptive_k, vec![expected.len()]);

        // With the default baseline of 7 the same row keeps its first 7.
        let r7 = refine_edges(&table(&[&row]), 7).unwrap();
        assert!(r7.adaptive_k[0] >= 7);
        let mut plateau = vec![1.0];
        plateau.extend([3.0; 9]);
        let dm = running_threshold(&plateau);
        assert!(dm[..7].iter().all(|&v| v <= dm[6]));
    }

    #[test]
    fn refine_errors() {
        let nt = table(&[&[1.0; 5]]);
        assert!(refine_edges(&nt, 6).is_err());
        assert!(refine_edges(&nt, 1).is_err());
    }

    #[test]
    fn mutuality() {
        let directed = DirectedEdges {
            out: vec![vec![(1, 1.0), (2, 2.0)], vec![(0, 1.0)], vec![(1, 1.5)]],
            adaptive_k: vec![2, 1, 1],
        };
        let g = mutual_filter(&directed);
        assert_eq!(g.edges(), &[Edge { i: 0, j: 1, dist: 1.0 }]);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.isolated(), vec![2]);
        assert_eq!(g.components(), vec![0, 0, 1]);
    }

    #[test]
    fn fully_mutual_regular_graph() {
        // Ring lattice: each vertex points at its 2 neighbors on each side.
        let n = 10;
        let out = (0..n)
            .map(|i| [1, 2, n - 1, n - 2].iter().map(|o| ((i + o) % n, 1.0)).collect())
            .collect();
        let g = mutual_filter(&DirectedEdges {
            out,
            adaptive_k: vec![4; n],
        });
        assert_eq!(g.edge_count(), n * 4 / 2);
    }

    #[test]
    fn edge_percentages() {
        let mk = |m: usize| {
            let all = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let edges = all[..m].iter().map(|&(i, j)| Edge { i, j, dist: 1.0 }).collect();
            RefinedGraph::from_edges(4, edges, vec![0; 4])
        };
        assert_eq!(edge_percentage(&mk(3)).unwrap(), 50.0);
        assert_eq!(edge_percentage(&mk(6)).unwrap(), 100.0);
        assert!(edge_percentage(&RefinedGraph::from_edges(1, vec![], vec![0])).is_err());
    }

    #[test]
    fn default_k_max_rule() {
        assert_eq!(default_k_max(1000, 7), 30);
        assert_eq!(default_k_max(1000, 50), 150);
        assert_eq!(default_k_max(10, 7), 9);
    }
}
