#![no_main]

use libfuzzer_sys::fuzz_target;
use scriptaffect::corpus::{ingest_metadata, MAX_YEAR, MIN_YEAR};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(meta) = ingest_metadata(text) {
        assert!(meta.values().all(|m| (MIN_YEAR..=MAX_YEAR).contains(&m.year)));
    }
});
