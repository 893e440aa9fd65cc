//! Replays the checked-in fuzz corpus through the same entry points and
//! checks as the fuzz targets, so regressions show up under `cargo test`.

use std::path::PathBuf;

use refknn::dataset::{detect_label_column, parse_csv, parse_labels};
use refknn::knn_graph::read_edge_list;
use refknn::{cluster, ClusterConfig, GeneratorSpec};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn parse_csv_seeds() {
    let mut parsed = 0;
    for (name, data) in seeds("parse_csv") {
        for col in [None, detect_label_column(&data), Some(0)] {
            if let Ok(ps) = parse_csv(&data, col) {
                assert_eq!(ps.coords().len(), ps.len() * ps.dim(), "{name}");
                assert!(ps.coords().iter().all(|x| x.is_finite()), "{name}");
                parsed += 1;
            }
        }
    }
    assert!(parsed > 0);
}

#[test]
fn parse_labels_seeds() {
    for (name, data) in seeds("parse_labels") {
        if let Ok(labels) = parse_labels(&data, 0) {
            let max = labels.iter().copied().max().unwrap();
            assert!((0..=max).all(|l| labels.contains(&l)), "{name}");
        }
    }
}

#[test]
fn generator_spec_seeds() {
    for (name, data) in seeds("generator_spec") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(spec) = GeneratorSpec::parse(text) {
            assert_eq!(GeneratorSpec::parse(&spec.to_string()).unwrap(), spec, "{name}");
        }
    }
}

#[test]
fn edge_list_seeds() {
    let mut ok = 0;
    for (name, data) in seeds("edge_list") {
        if let Ok(edges) = read_edge_list(std::str::from_utf8(&data).unwrap()) {
            assert!(edges.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)), "{name}");
            ok += 1;
        }
    }
    assert_eq!(ok, 1);
}

#[test]
fn cluster_csv_seeds() {
    for (name, data) in seeds("cluster_csv") {
        let Ok(ps) = parse_csv(&data, None) else { continue };
        if let Ok(report) = cluster(&ps, &ClusterConfig::default()) {
            assert_eq!(report.labels.len(), ps.len(), "{name}");
            assert!(report.labels.iter().all(|&l| l < report.c.max(1)), "{name}");
        }
    }
}
