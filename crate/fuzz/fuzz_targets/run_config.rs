#![no_main]

use std::path::Path;

use harmonic_cli::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::parse(text, Path::new(".")) {
        let again = RunConfig::parse(&cfg.to_text(), Path::new(".")).expect("written config must parse");
        assert_eq!(cfg, again);
    }
});
