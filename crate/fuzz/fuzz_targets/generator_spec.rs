#![no_main]

use libfuzzer_sys::fuzz_target;
use refknn::GeneratorSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = GeneratorSpec::parse(text) {
        let again = GeneratorSpec::parse(&spec.to_string()).expect("display output parses");
        assert_eq!(spec, again);
    }
});
