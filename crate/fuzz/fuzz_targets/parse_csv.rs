#![no_main]

use libfuzzer_sys::fuzz_target;
use refknn::dataset::{detect_label_column, parse_csv};

fuzz_target!(|data: &[u8]| {
    let column = detect_label_column(data);
    for col in [None, column, Some(0)] {
        if let Ok(ps) = parse_csv(data, col) {
            assert_eq!(ps.coords().len(), ps.len() * ps.dim());
            assert!(ps.coords().iter().all(|x| x.is_finite()));
            if let Some(labels) = ps.labels() {
                assert_eq!(labels.len(), ps.len());
            }
        }
    }
});
