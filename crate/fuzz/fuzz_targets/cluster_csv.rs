#![no_main]

use libfuzzer_sys::fuzz_target;
use refknn::dataset::parse_csv;
use refknn::{cluster, ClusterConfig};

// Whole pipeline on small inputs: must return Ok or Err, never panic.
fuzz_target!(|data: &[u8]| {
    let Ok(ps) = parse_csv(data, None) else { return };
    if ps.len() > 300 || ps.dim() > 8 {
        return;
    }
    if let Ok(report) = cluster(&ps, &ClusterConfig::default()) {
        assert_eq!(report.labels.len(), ps.len());
        assert!(report.labels.iter().all(|&l| l < report.c.max(1)));
    }
});
