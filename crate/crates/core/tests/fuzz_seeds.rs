//! Replays the checked-in fuzz corpus through the same entry points the fuzz
//! targets exercise, so the seeds stay meaningful on a stable toolchain.

use std::path::PathBuf;

use scriptaffect::corpus::ingest_metadata;
use scriptaffect::emotion::{load_lexicon, score_dialogue};
use scriptaffect::parser::{blocks_from_positional, parse_script, CharacterDictionary, InputMode};
use scriptaffect::Corpus;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), std::fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn plain_script_seeds() {
    for (name, data) in seeds("plain_script") {
        let text = String::from_utf8_lossy(&data);
        if let Ok(dict) = parse_script(&text, InputMode::PlainText, 0) {
            assert!(dict.entries.keys().all(|k| !k.is_empty() && !k.contains('(')), "{name}");
            assert_eq!(CharacterDictionary::from_json(&dict.to_json()).unwrap(), dict, "{name}");
        }
    }
}

#[test]
fn positional_script_seeds() {
    for (name, data) in seeds("positional_script") {
        let text = std::str::from_utf8(&data).unwrap();
        if let Ok(blocks) = blocks_from_positional(text) {
            assert!(blocks.iter().all(|b| !b.text.is_empty()), "{name}");
        }
        let _ = parse_script(text, InputMode::Positional, 1);
    }
}

#[test]
fn lexicon_seeds() {
    for (name, data) in seeds("lexicon_tsv") {
        let text = std::str::from_utf8(&data).unwrap();
        if let Ok(lexicon) = load_lexicon(text) {
            let pv = score_dialogue(text, &lexicon);
            assert!(pv.hit_count == 0 || (pv.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{name}");
        }
    }
}

#[test]
fn metadata_seeds() {
    let mut parsed = 0;
    for (_, data) in seeds("metadata_csv") {
        if ingest_metadata(std::str::from_utf8(&data).unwrap()).is_ok() {
            parsed += 1;
        }
    }
    assert!(parsed >= 1);
}

#[test]
fn json_seeds() {
    for (name, data) in seeds("dictionary_json") {
        let text = std::str::from_utf8(&data).unwrap();
        if let Ok(dict) = CharacterDictionary::from_json(text) {
            assert_eq!(CharacterDictionary::from_json(&dict.to_json()).unwrap(), dict, "{name}");
        }
        if let Ok(corpus) = Corpus::from_json(text) {
            assert_eq!(Corpus::from_json(&corpus.to_json()).unwrap(), corpus, "{name}");
        }
    }
}
