#![no_main]

use libfuzzer_sys::fuzz_target;
use scriptaffect::parser::{parse_script, CharacterDictionary, InputMode};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(dict) = parse_script(&text, InputMode::PlainText, 0) {
        for name in dict.entries.keys() {
            assert!(!name.is_empty() && !name.contains('('));
        }
        assert_eq!(CharacterDictionary::from_json(&dict.to_json()).unwrap(), dict);
    }
});
