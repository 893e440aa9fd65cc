use std::time::Instant;

use refknn::knn_graph::{build_neighbor_table, mutual_filter, refine_edges, running_threshold, RefinedGraph};
use refknn::PointSet;
use refknn_testkit::graph;
use refknn_testkit::uniform_points;

fn points(n: usize, dim: usize, seed: u64) -> (PointSet, Vec<f64>) {
    let raw = uniform_points(n, dim, seed);
    (PointSet::new("uniform", dim, raw.clone(), None).unwrap(), raw)
}

#[test]
fn table_matches_all_pairs_scan() {
    let (ps, raw) = points(200, 5, 11);
    let table = build_neighbor_table(&ps, 20).unwrap();
    let (ids, dists) = graph::knn(&raw, 5, 20);
    for i in 0..200 {
        assert_eq!(table.ids(i), &ids[i][..], "row {i}");
        assert_eq!(table.dists(i), &dists[i][..], "row {i}");
    }
}

#[test]
fn table_on_grid_with_many_ties() {
    // Integer grid: distances tie constantly, so order is decided by index.
    let mut raw = Vec::new();
    for x in 0..12 {
        for y in 0..12 {
            raw.extend_from_slice(&[x as f64, y as f64]);
        }
    }
    let ps = PointSet::new("grid", 2, raw.clone(), None).unwrap();
    let table = build_neighbor_table(&ps, 12).unwrap();
    let (ids, _) = graph::knn(&raw, 2, 12);
    for (i, row) in ids.iter().enumerate() {
        assert_eq!(table.ids(i), &row[..]);
    }
}

#[test]
fn running_threshold_matches_prefix_loops() {
    let row: Vec<f64> = {
        let mut r = uniform_points(10, 1, 5);
        r.sort_by(f64::total_cmp);
        r
    };
    let fast = running_threshold(&row);
    let slow = graph::prefix_mean_plus_std(&row);
    for (a, b) in fast.iter().zip(&slow) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }
}

fn assert_matches_reference(n: usize, dim: usize, seed: u64, k_max: usize, baseline: usize) {
    let (ps, raw) = points(n, dim, seed);
    let g = RefinedGraph::build(&ps, k_max, baseline).unwrap();
    let (edges, counts) = graph::refined_edges(&raw, dim, k_max, baseline);
    let got: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.i, e.j)).collect();
    assert_eq!(got, edges, "n={n} seed={seed}");
    assert_eq!(g.adaptive_k(), &counts[..]);
    for e in g.edges() {
        assert!(g.has_edge(e.i, e.j) && g.has_edge(e.j, e.i));
        assert_eq!(e.dist, graph::distance(ps.point(e.i), ps.point(e.j)));
    }
}

#[test]
fn refined_graph_matches_reference() {
    for (seed, n) in [(1, 40), (2, 120), (3, 300)] {
        assert_matches_reference(n, 2, seed, 30, 7);
    }
    assert_matches_reference(150, 3, 4, 25, 12);
}

#[test]
fn directed_then_mutual_is_symmetric() {
    let (ps, _) = points(250, 2, 9);
    let table = build_neighbor_table(&ps, 30).unwrap();
    let directed = refine_edges(&table, 7).unwrap();
    let g = mutual_filter(&directed);
    for i in 0..g.n() {
        for &(j, _) in g.neighbors(i) {
            assert!(g.neighbors(j).iter().any(|&(k, _)| k == i));
        }
        assert!(g.adaptive_k()[i] <= 30);
    }
    assert!(g.edge_count() <= 250 * 30);
}

#[test]
fn refinement_is_deterministic() {
    let (ps, _) = points(300, 2, 21);
    let a = RefinedGraph::build(&ps, 30, 7).unwrap();
    let b = RefinedGraph::build(&ps, 30, 7).unwrap();
    assert_eq!(a.edges(), b.edges());
}

fn best_of_three(ps: &PointSet) -> f64 {
    (0..3)
        .map(|_| {
            let t = Instant::now();
            build_neighbor_table(ps, 20).unwrap();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn neighbor_table_scales_subquadratically() {
    let (small, _) = points(2_000, 2, 31);
    let (large, _) = points(20_000, 2, 32);
    let ratio = best_of_three(&large) / best_of_three(&small);
    // Quadratic growth would be 100x; n log n is about 13x.
    assert!(ratio < 40.0, "time ratio {ratio}");
}
