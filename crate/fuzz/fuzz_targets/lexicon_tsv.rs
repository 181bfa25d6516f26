#![no_main]

use libfuzzer_sys::fuzz_target;
use scriptaffect::emotion::{load_lexicon, score_dialogue};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(lexicon) = load_lexicon(text) {
        let pv = score_dialogue(text, &lexicon);
        assert!(pv.hit_count == 0 || (pv.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
});
