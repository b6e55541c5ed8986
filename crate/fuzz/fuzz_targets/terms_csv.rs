#![no_main]

use harmonic_core::density::io::{parse_terms_csv, write_terms_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(terms) = parse_terms_csv(text) {
        let again = parse_terms_csv(&write_terms_csv(&terms)).expect("written terms must parse");
        assert_eq!(terms, again);
    }
});
