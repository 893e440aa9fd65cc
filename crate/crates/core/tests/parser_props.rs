//! Random and mutated inputs for every parser: errors are fine, panics and
//! broken invariants are not.

use proptest::prelude::*;
use refknn::dataset::{parse_csv, parse_labels};
use refknn::knn_graph::read_edge_list;
use refknn::GeneratorSpec;

fn csv_like() -> impl Strategy<Value = String> {
    let cell = prop_oneof![
        any::<f64>().prop_map(|x| x.to_string()),
        (-100i32..100).prop_map(|x| x.to_string()),
        "[a-z]{0,3}",
        Just(String::new()),
    ];
    prop::collection::vec(prop::collection::vec(cell, 1..4), 0..12)
        .prop_map(|rows| rows.iter().map(|r| r.join(",")).collect::<Vec<_>>().join("\n"))
}

fn spec_like() -> impl Strategy<Value = String> {
    let shape = prop_oneof![
        Just("rings"),
        Just("lines"),
        Just("blobs"),
        Just("sparse_blobs"),
        Just("x")
    ];
    let key = prop_oneof![
        Just("n"),
        Just("r"),
        Just("jitter"),
        Just("count"),
        Just("length"),
        Just("spacing"),
        Just("centers"),
        Just("spread"),
        Just("noise"),
        Just("radii"),
    ];
    let value = prop_oneof![
        "[0-9]{1,3}(,[0-9]{1,3}){0,2}",
        "[0-9]\\.[0-9]{1,2}",
        "(\\([0-9],[0-9]\\)){1,3}",
        "[-a-z().]{0,4}",
    ];
    (shape, prop::collection::vec((key, value), 0..4)).prop_map(|(s, kv)| {
        if kv.is_empty() {
            s.to_string()
        } else {
            let body: Vec<String> = kv.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{s}:{}", body.join(";"))
        }
    })
}

proptest! {
    #[test]
    fn csv_bytes_never_panic(data in prop::collection::vec(any::<u8>(), 0..200)) {
        for col in [None, Some(0), Some(2)] {
            if let Ok(ps) = parse_csv(&data, col) {
                prop_assert_eq!(ps.coords().len(), ps.len() * ps.dim());
            }
        }
    }

    #[test]
    fn csv_shaped_text(text in csv_like()) {
        if let Ok(ps) = parse_csv(text.as_bytes(), None) {
            prop_assert!(ps.coords().iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn labels_are_dense(text in "([0-9]{1,2}|[a-c]{1,2})(\n([0-9]{1,2}|[a-c]{1,2})){0,15}") {
        if let Ok(labels) = parse_labels(text.as_bytes(), 0) {
            let max = labels.iter().copied().max().unwrap();
            prop_assert!((0..=max).all(|l| labels.contains(&l)));
        }
    }

    #[test]
    fn spec_display_round_trips(text in spec_like()) {
        if let Ok(spec) = GeneratorSpec::parse(&text) {
            prop_assert_eq!(GeneratorSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn spec_bytes_never_panic(text in "\\PC{0,40}") {
        let _ = GeneratorSpec::parse(&text);
    }

    #[test]
    fn edge_lists_are_sorted(text in "([0-9] [0-9] [0-9.einf-]{1,4}\n){0,8}") {
        if let Ok(edges) = read_edge_list(&text) {
            prop_assert!(edges.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
            prop_assert!(edges.iter().all(|e| e.i < e.j && e.dist.is_finite() && e.dist >= 0.0));
        }
    }
}
