use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{edge_percentage, Edge, RefinedGraph};
use crate::{Error, Result};

/// JSON-friendly description of a refined graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edge_count: usize,
    pub e_percent: f64,
    pub isolated: usize,
    pub components: usize,
    /// adaptive k -> number of points with that many surviving directed edges
    pub adaptive_k_histogram: BTreeMap<usize, usize>,
}

impl GraphSummary {
    pub fn of(g: &RefinedGraph) -> Result<Self> {
        let mut adaptive_k_histogram = BTreeMap::new();
        for &k in g.adaptive_k() {
            *adaptive_k_histogram.entry(k).or_insert(0) += 1;
        }
        Ok(Self {
            n: g.n(),
            edge_count: g.edge_count(),
            e_percent: edge_percentage(g)?,
            isolated: g.isolated().len(),
            components: g.components().iter().max().map_or(0, |m| m + 1),
            adaptive_k_histogram,
        })
    }
}

/// One `i j distance` line per undirected edge, `i < j`, 0-based ids.
pub fn write_edge_list<W: Write>(g: &RefinedGraph, mut w: W) -> std::io::Result<()> {
    for e in g.edges() {
        writeln!(w, "{} {} {}", e.i, e.j, e.dist)?;
    }
    Ok(())
}

/// Parses the edge-list format written by [`write_edge_list`]. Blank lines
/// and `#` comments are skipped. Edges come back sorted by `(i, j)`.
pub fn read_edge_list(text: &str) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line: no + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j, d] = fields[..] else {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        };
        let i: usize = i.parse().map_err(|_| bad(format!("bad vertex id {i:?}")))?;
        let j: usize = j.parse().map_err(|_| bad(format!("bad vertex id {j:?}")))?;
        let dist: f64 = d.parse().map_err(|_| bad(format!("bad distance {d:?}")))?;
        if i >= j {
            return Err(bad(format!("edge ({i}, {j}) must have i < j")));
        }
        if !(dist.is_finite() && dist >= 0.0) {
            return Err(bad(format!("distance {dist} must be finite and non-negative")));
        }
        edges.push(Edge { i, j, dist });
    }
    edges.sort_by_key(|a| (a.i, a.j));
    if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
        return Err(Error::Parse {
            line: 0,
            message: format!("duplicate edge ({}, {})", w[0].i, w[0].j),
        });
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_malformed_lines() {
        assert!(read_edge_list("0 1").is_err());
        assert!(read_edge_list("1 0 2.0").is_err());
        assert!(read_edge_list("0 1 -1").is_err());
        assert!(read_edge_list("0 1 NaN").is_err());
        assert!(read_edge_list("0 1 1\n0 1 2").is_err());
        assert_eq!(read_edge_list("# c\n\n0 2 0.5\n").unwrap().len(), 1);
    }

    #[test]
    fn summary_counts() {
        let g = RefinedGraph::from_edges(
            4,
            vec![Edge { i: 0, j: 1, dist: 1.0 }, Edge { i: 1, j: 2, dist: 1.0 }],
            vec![1, 2, 1, 0],
        );
        let s = GraphSummary::of(&g).unwrap();
        assert_eq!((s.edge_count, s.isolated, s.components), (2, 1, 2));
        assert_eq!(s.adaptive_k_histogram[&1], 2);
        assert!((s.e_percent - 100.0 / 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(raw in prop::collection::btree_map((0usize..50, 0usize..50), 0.0f64..1e6, 0..60)) {
            let edges: Vec<Edge> = raw
                .into_iter()
                .filter(|((i, j), _)| i < j)
                .map(|((i, j), dist)| Edge { i, j, dist })
                .collect();
            let g = RefinedGraph::from_edges(50, edges.clone(), vec![0; 50]);
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf).unwrap();
            prop_assert_eq!(read_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap(), edges);
        }
    }
}
