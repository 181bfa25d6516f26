#![no_main]

use libfuzzer_sys::fuzz_target;
use scriptaffect::parser::CharacterDictionary;
use scriptaffect::Corpus;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dict) = CharacterDictionary::from_json(text) {
        assert_eq!(CharacterDictionary::from_json(&dict.to_json()).unwrap(), dict);
    }
    if let Ok(corpus) = Corpus::from_json(text) {
        assert_eq!(Corpus::from_json(&corpus.to_json()).unwrap(), corpus);
    }
});
