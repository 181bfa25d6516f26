//! Word-usage contrasts between female and male dialogue.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Gender};
use crate::emotion::tokenize;

const BUNDLED_NOUNS: &str = include_str!("../resources/nouns.txt");
const BUNDLED_STOPWORDS: &str = include_str!("../resources/stopwords.txt");

/// Tokens shorter than this (in characters) are never counted.
pub const MIN_TOKEN_CHARS: usize = 2;
pub const DEFAULT_TOP_N: usize = 50;

/// A set of lowercase words read from newline-delimited text. Blank lines and
/// lines starting with `#` are skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordList(BTreeSet<String>);

impl WordList {
    pub fn parse(text: &str) -> Self {
        WordList(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn bundled_nouns() -> Self {
        Self::parse(BUNDLED_NOUNS)
    }

    pub fn bundled_stopwords() -> Self {
        Self::parse(BUNDLED_STOPWORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for WordList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        WordList(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Token counts per gender group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub counts: BTreeMap<Gender, BTreeMap<String, u64>>,
}

impl FrequencyTable {
    pub fn group(&self, gender: Gender) -> Option<&BTreeMap<String, u64>> {
        self.counts.get(&gender)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.values().all(BTreeMap::is_empty)
    }
}

/// Counts dialogue tokens for the female and male groups. Unknown-gender
/// characters are not counted.
pub fn group_frequencies(corpus: &Corpus, stopwords: &WordList) -> FrequencyTable {
    let mut table = FrequencyTable::default();
    for record in &corpus.records {
        if record.gender == Gender::Unknown {
            continue;
        }
        for dialogue in &record.dialogues {
            for token in tokenize(dialogue) {
                if token.chars().count() < MIN_TOKEN_CHARS || stopwords.contains(&token) {
                    continue;
                }
                *table
                    .counts
                    .entry(record.gender)
                    .or_default()
                    .entry(token)
                    .or_default() += 1;
            }
        }
    }
    table
}

/// Nouns used by exactly one group, top `top_n` per group by count with ties
/// broken alphabetically. Overlap is decided on word presence, not counts.
pub fn exclusive_nouns(
    freq: &FrequencyTable,
    nouns: &WordList,
    top_n: usize,
) -> BTreeMap<Gender, Vec<(String, u64)>> {
    let empty = BTreeMap::new();
    let female = freq.group(Gender::Female).unwrap_or(&empty);
    let male = freq.group(Gender::Male).unwrap_or(&empty);
    let pick = |own: &BTreeMap<String, u64>, other: &BTreeMap<String, u64>| {
        let mut words: Vec<(String, u64)> = own
            .iter()
            .filter(|(w, _)| nouns.contains(w) && !other.contains_key(*w))
            .map(|(w, &c)| (w.clone(), c))
            .collect();
        words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        words.truncate(top_n);
        words
    };
    let mut out = BTreeMap::new();
    out.insert(Gender::Female, pick(female, male));
    out.insert(Gender::Male, pick(male, female));
    out
}
