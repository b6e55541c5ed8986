#![no_main]

use harmonic_cli::table::Table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = Table::parse(text) {
        // compare through text so NaN cells count as equal
        let csv = table.to_csv().expect("parsed table must write");
        let again = Table::parse(&csv).expect("written table must parse");
        assert_eq!(again.to_csv().unwrap(), csv);
        assert_eq!(again.columns, table.columns);
        assert_eq!(again.meta, table.meta);
    }
});
