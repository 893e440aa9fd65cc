#![no_main]

use libfuzzer_sys::fuzz_target;
use refknn::dataset::parse_labels;

fuzz_target!(|data: &[u8]| {
    if let Ok(labels) = parse_labels(data, 0) {
        // Ids are dense: every value below the maximum is used.
        if let Some(&max) = labels.iter().max() {
            let mut seen = vec![false; max + 1];
            labels.iter().for_each(|&l| seen[l] = true);
            assert!(seen.into_iter().all(|s| s));
        }
    }
});
