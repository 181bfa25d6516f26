#![no_main]

use libfuzzer_sys::fuzz_target;
use scriptaffect::parser::{blocks_from_positional, parse_script, InputMode};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(blocks) = blocks_from_positional(text) {
        assert!(blocks.iter().all(|b| !b.text.is_empty()));
    }
    let _ = parse_script(text, InputMode::Positional, 1);
});
