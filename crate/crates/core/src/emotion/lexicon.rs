//! Word-level affect lexicon in the NRC `word<TAB>affect<TAB>flag` layout.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::dyads::Primary;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("lexicon line {line}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmotionLexicon {
    entries: BTreeMap<String, BTreeSet<Primary>>,
    /// Rows whose term contains whitespace; matching is token-level only.
    skipped_phrases: usize,
}

impl EmotionLexicon {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Primary)>) -> Self {
        let mut lex = EmotionLexicon::default();
        for (word, affect) in pairs {
            lex.insert(word, affect);
        }
        lex
    }

    /// Adds one association. Returns `false` (and adds nothing) for empty or
    /// multi-word terms.
    pub fn insert(&mut self, word: &str, affect: Primary) -> bool {
        let word = word.trim().to_lowercase();
        if word.is_empty() || word.contains(char::is_whitespace) {
            return false;
        }
        self.entries.entry(word).or_default().insert(affect);
        true
    }

    pub fn affects(&self, word: &str) -> Option<&BTreeSet<Primary>> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn skipped_phrases(&self) -> usize {
        self.skipped_phrases
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &BTreeSet<Primary>)> {
        self.entries.iter().map(|(w, a)| (w.as_str(), a))
    }
}

/// Loads an NRC-style lexicon. Rows with flag 1 and one of the eight primary
/// affects become entries; `positive`/`negative` rows and flag-0 rows are
/// accepted and ignored. Blank lines are skipped.
pub fn load_lexicon(tsv_source: &str) -> Result<EmotionLexicon, LexiconError> {
    let mut lex = EmotionLexicon::default();
    for (idx, raw) in tsv_source.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| LexiconError { line, message };
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let word = fields[0].trim();
        if word.is_empty() {
            return Err(err("empty word".into()));
        }
        let affect_name = fields[1].trim().to_ascii_lowercase();
        let flag = match fields[2].trim() {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("flag must be 0 or 1, found {other:?}"))),
        };
        let affect = match affect_name.as_str() {
            "positive" | "negative" => None,
            name => Some(
                Primary::from_name(name).ok_or_else(|| err(format!("unknown affect {name:?}")))?,
            ),
        };
        if word.contains(char::is_whitespace) {
            if flag {
                lex.skipped_phrases += 1;
            }
            continue;
        }
        if let (true, Some(affect)) = (flag, affect) {
            lex.insert(word, affect);
        }
    }
    Ok(lex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_semantics() {
        let lex = load_lexicon("abandon\tfear\t1\nabandon\tjoy\t0\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(
            lex.affects("abandon").unwrap().iter().copied().collect::<Vec<_>>(),
            vec![Primary::Fear]
        );
    }

    #[test]
    fn sentiment_rows_ignored() {
        let lex = load_lexicon("happy\tpositive\t1\nhappy\tnegative\t0\n").unwrap();
        assert!(lex.affects("happy").is_none());
    }

    #[test]
    fn empty_file_is_empty_lexicon() {
        assert!(load_lexicon("").unwrap().is_empty());
        assert!(load_lexicon("\n\n").unwrap().is_empty());
    }

    #[test]
    fn malformed_rows_report_line() {
        for (src, line) in [
            ("ok\tjoy\t1\nbad row\n", 2),
            ("a\tjoy\t2\n", 1),
            ("a\tecstasy\t1\n", 1),
            ("\n\n\tjoy\t1\n", 3),
            ("a\tjoy\t1\textra\n", 1),
        ] {
            assert_eq!(load_lexicon(src).unwrap_err().line, line, "{src:?}");
        }
    }

    #[test]
    fn phrases_counted_and_skipped() {
        let lex = load_lexicon("fall apart\tsadness\t1\nfall apart\tjoy\t0\nCRASH\tfear\t1\r\n").unwrap();
        assert_eq!(lex.skipped_phrases(), 1);
        assert_eq!(lex.len(), 1);
        assert!(lex.affects("crash").is_some());
    }
}
