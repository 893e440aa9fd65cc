#![no_main]

use libfuzzer_sys::fuzz_target;
use refknn::knn_graph::read_edge_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(edges) = read_edge_list(text) {
        for w in edges.windows(2) {
            assert!((w[0].i, w[0].j) < (w[1].i, w[1].j));
        }
        assert!(edges.iter().all(|e| e.i < e.j && e.dist >= 0.0));
    }
});
