//! Dialogue emotion embeddings.
//!
//! Every lexicon hit contributes one count to each affect attached to the
//! word; normalizing the counts gives an 8-dimensional probability vector over
//! the primaries. The 24 dyads are the arithmetic mean of their two
//! primaries, giving a 32-dimensional vector in [`EMOTION_COLUMNS`] order.

mod dyads;
mod lexicon;

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dyads::{
    column_index, Dyad, DyadTable, DyadTableError, Primary, COLUMN_ALIASES, EMOTION_COLUMNS,
    STANDARD_DYADS,
};
pub use lexicon::{load_lexicon, EmotionLexicon, LexiconError};

use crate::corpus::CharacterRecord;
use dyads::ColumnSource;

pub const EMOTION_DIM: usize = 32;

/// Splits text into lowercase word tokens. Runs of letters and apostrophes
/// form tokens; apostrophes at either end of a run are dropped, so `don't`
/// survives intact while `'cause'` becomes `cause`. Curly apostrophes are
/// folded to `'`.
pub fn tokenize(dialogue: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut push = |current: &mut String| {
        let trimmed = current.trim_matches('\'');
        if !trimmed.is_empty() {
            tokens.push(trimmed.to_string());
        }
        current.clear();
    };
    for ch in dialogue.chars() {
        if ch.is_alphabetic() {
            current.extend(ch.to_lowercase());
        } else if ch == '\'' || ch == '\u{2019}' {
            current.push('\'');
        } else {
            push(&mut current);
        }
    }
    push(&mut current);
    tokens
}

/// Probability distribution over the eight primaries for one dialogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryVector {
    pub scores: [f64; 8],
    pub hit_count: u32,
}

impl PrimaryVector {
    pub fn zero() -> Self {
        PrimaryVector {
            scores: [0.0; 8],
            hit_count: 0,
        }
    }

    /// Builds a vector from explicit scores. `hit_count` only matters for the
    /// zero-evidence check in [`sentiment_of`].
    pub fn from_scores(pairs: &[(Primary, f64)], hit_count: u32) -> Self {
        let mut scores = [0.0; 8];
        for &(p, v) in pairs {
            scores[p.index()] = v;
        }
        PrimaryVector { scores, hit_count }
    }

    pub fn get(&self, p: Primary) -> f64 {
        self.scores[p.index()]
    }

    pub fn positive_mass(&self) -> f64 {
        Primary::ALL
            .iter()
            .filter(|p| p.is_positive())
            .map(|p| self.get(*p))
            .sum()
    }

    pub fn negative_mass(&self) -> f64 {
        Primary::ALL
            .iter()
            .filter(|p| !p.is_positive())
            .map(|p| self.get(*p))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionVector32(pub [f64; EMOTION_DIM]);

impl EmotionVector32 {
    pub fn zero() -> Self {
        EmotionVector32([0.0; EMOTION_DIM])
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        column_index(name).map(|i| self.0[i])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Element-wise mean; `None` for an empty input.
    pub fn mean<'a>(vectors: impl IntoIterator<Item = &'a EmotionVector32>) -> Option<Self> {
        let mut acc = [0.0; EMOTION_DIM];
        let mut n = 0usize;
        for v in vectors {
            for (a, x) in acc.iter_mut().zip(v.0.iter()) {
                *a += x;
            }
            n += 1;
        }
        if n == 0 {
            return None;
        }
        for a in &mut acc {
            *a /= n as f64;
        }
        Some(EmotionVector32(acc))
    }
}

impl Index<usize> for EmotionVector32 {
    type Output = f64;

    fn index(&self, idx: usize) -> &f64 {
        &self.0[idx]
    }
}

pub fn score_dialogue(dialogue: &str, lexicon: &EmotionLexicon) -> PrimaryVector {
    let mut counts = [0u32; 8];
    for token in tokenize(dialogue) {
        if let Some(affects) = lexicon.affects(&token) {
            for a in affects {
                counts[a.index()] += 1;
            }
        }
    }
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return PrimaryVector::zero();
    }
    let mut scores = [0.0; 8];
    for (s, c) in scores.iter_mut().zip(counts) {
        *s = f64::from(c) / f64::from(total);
    }
    PrimaryVector {
        scores,
        hit_count: total,
    }
}

pub fn dyad_expand(pv: &PrimaryVector, table: &DyadTable) -> EmotionVector32 {
    let mut out = [0.0; EMOTION_DIM];
    for (slot, source) in out.iter_mut().zip(table.layout()) {
        *slot = match *source {
            ColumnSource::Primary(p) => pv.get(p),
            ColumnSource::Dyad(a, b) => (pv.get(a) + pv.get(b)) / 2.0,
        };
    }
    EmotionVector32(out)
}

pub fn embed_dialogue(
    dialogue: &str,
    lexicon: &EmotionLexicon,
    table: &DyadTable,
) -> (EmotionVector32, u32) {
    let pv = score_dialogue(dialogue, lexicon);
    (dyad_expand(&pv, table), pv.hit_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        })
    }
}

// Masses are sums of count/total fractions; a relative slack absorbs the
// rounding of those sums so exact count ties read as ties.
const TIE_EPS: f64 = 1e-12;

/// Compares positive (joy, anticipation, trust, surprise) against negative
/// (anger, fear, sadness, disgust) mass.
pub fn sentiment_of(pv: &PrimaryVector) -> SentimentLabel {
    if pv.hit_count == 0 {
        return SentimentLabel::Neutral;
    }
    let pos = pv.positive_mass();
    let neg = pv.negative_mass();
    let slack = TIE_EPS * pos.abs().max(neg.abs());
    if pos > neg + slack {
        SentimentLabel::Positive
    } else if neg > pos + slack {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

/// Anything that can label a dialogue positive/negative/neutral.
pub trait SentimentClassifier {
    fn classify(&self, dialogue: &str) -> SentimentLabel;
}

/// Lexicon-backed classifier: sign of positive minus negative primary mass.
pub struct LexiconSentiment<'a> {
    pub lexicon: &'a EmotionLexicon,
}

impl SentimentClassifier for LexiconSentiment<'_> {
    fn classify(&self, dialogue: &str) -> SentimentLabel {
        sentiment_of(&score_dialogue(dialogue, self.lexicon))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgreementError {
    #[error("labeling {name:?} has length {len}, expected {expected}")]
    Length {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("need at least one non-empty labeling")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Pairwise fraction of positions on which two labelings agree.
pub fn agreement_matrix<L: PartialEq>(
    labelings: &[(String, Vec<L>)],
) -> Result<AgreementMatrix, AgreementError> {
    let expected = labelings.first().map(|(_, l)| l.len()).unwrap_or(0);
    if expected == 0 {
        return Err(AgreementError::Empty);
    }
    for (name, labels) in labelings {
        if labels.len() != expected {
            return Err(AgreementError::Length {
                name: name.clone(),
                len: labels.len(),
                expected,
            });
        }
    }
    let n = labelings.len();
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let same = labelings[i]
                .1
                .iter()
                .zip(&labelings[j].1)
                .filter(|(a, b)| a == b)
                .count();
            let acc = same as f64 / expected as f64;
            values[i][j] = acc;
            values[j][i] = acc;
        }
    }
    Ok(AgreementMatrix {
        names: labelings.iter().map(|(n, _)| n.clone()).collect(),
        values,
    })
}

/// Mean emotion vector over a character's dialogues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterEmotion {
    pub vector: EmotionVector32,
    /// No dialogue had a single lexicon hit; `vector` is all zeros.
    pub no_affect: bool,
    pub dialogue_count: usize,
    pub scored_dialogues: usize,
}

/// Averages the 32-d vectors of the dialogues that hit the lexicon at least
/// once. Zero-hit dialogues carry no evidence and are left out of the mean.
pub fn aggregate_character(
    record: &CharacterRecord,
    lexicon: &EmotionLexicon,
    table: &DyadTable,
) -> CharacterEmotion {
    let scored: Vec<EmotionVector32> = record
        .dialogues
        .iter()
        .map(|d| embed_dialogue(d, lexicon, table))
        .filter(|(_, hits)| *hits > 0)
        .map(|(v, _)| v)
        .collect();
    let mean = EmotionVector32::mean(&scored);
    CharacterEmotion {
        no_affect: mean.is_none(),
        vector: mean.unwrap_or_else(EmotionVector32::zero),
        dialogue_count: record.dialogues.len(),
        scored_dialogues: scored.len(),
    }
}
