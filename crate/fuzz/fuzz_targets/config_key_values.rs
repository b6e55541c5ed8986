#![no_main]

use harmonic_core::density::io::{parse_key_values, write_key_values};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(entries) = parse_key_values(text) {
        let again = parse_key_values(&write_key_values(&entries)).expect("written config must parse");
        let pairs = |es: &[harmonic_core::density::io::Entry]| {
            es.iter().map(|e| (e.key.clone(), e.value.clone())).collect::<Vec<_>>()
        };
        assert_eq!(pairs(&entries), pairs(&again));
    }
});
