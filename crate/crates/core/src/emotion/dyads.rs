//! Plutchik primaries, the 24 primary dyads, and the fixed 32-column order.

use std::fmt;

use serde::{Deserialize, Serialize};

/// The eight primary emotions, in lexicon (alphabetical) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Primary {
    Anger,
    Anticipation,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
    Trust,
}

impl Primary {
    pub const ALL: [Primary; 8] = [
        Primary::Anger,
        Primary::Anticipation,
        Primary::Disgust,
        Primary::Fear,
        Primary::Joy,
        Primary::Sadness,
        Primary::Surprise,
        Primary::Trust,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Primary::Anger => "anger",
            Primary::Anticipation => "anticipation",
            Primary::Disgust => "disgust",
            Primary::Fear => "fear",
            Primary::Joy => "joy",
            Primary::Sadness => "sadness",
            Primary::Surprise => "surprise",
            Primary::Trust => "trust",
        }
    }

    pub fn from_name(name: &str) -> Option<Primary> {
        Primary::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn is_positive(self) -> bool {
        matches!(
            self,
            Primary::Joy | Primary::Anticipation | Primary::Trust | Primary::Surprise
        )
    }
}

impl fmt::Display for Primary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Column order of every 32-dimensional emotion vector and of the emitted
/// CSV files.
pub const EMOTION_COLUMNS: [&str; 32] = [
    "anger",
    "joy",
    "anticipation",
    "surprise",
    "trust",
    "delight",
    "sadness",
    "disgust",
    "hope",
    "curiosity",
    "despair",
    "confined",
    "envy",
    "cynicism",
    "pride",
    "love",
    "submission",
    "shame",
    "awe",
    "disapproval",
    "remorse",
    "aggression",
    "anxiety",
    "outrage",
    "fear",
    "dominance",
    "guilt",
    "sentimentality",
    "optimism",
    "pessimism",
    "contempt",
    "morbidness",
];

/// Report aliases accepted in place of canonical column names.
pub const COLUMN_ALIASES: [(&str, &str); 1] = [("aggressiveness", "aggression")];

/// Position of a column (or alias) in [`EMOTION_COLUMNS`].
pub fn column_index(name: &str) -> Option<usize> {
    let lower = name.to_ascii_lowercase();
    let canonical = COLUMN_ALIASES
        .iter()
        .find(|(alias, _)| *alias == lower)
        .map_or(lower.as_str(), |(_, c)| c);
    EMOTION_COLUMNS.iter().position(|c| *c == canonical)
}

use Primary::*;

/// Wheel adjacencies: primary dyads (neighbours), secondary dyads (one apart)
/// and tertiary dyads (two apart). Opposites never pair.
pub const STANDARD_DYADS: [(&str, Primary, Primary); 24] = [
    ("love", Joy, Trust),
    ("submission", Trust, Fear),
    ("awe", Fear, Surprise),
    ("disapproval", Surprise, Sadness),
    ("remorse", Sadness, Disgust),
    ("contempt", Disgust, Anger),
    ("aggression", Anger, Anticipation),
    ("optimism", Anticipation, Joy),
    ("guilt", Joy, Fear),
    ("curiosity", Trust, Surprise),
    ("despair", Fear, Sadness),
    ("confined", Surprise, Disgust),
    ("envy", Sadness, Anger),
    ("cynicism", Disgust, Anticipation),
    ("pride", Anger, Joy),
    ("hope", Anticipation, Trust),
    ("delight", Joy, Surprise),
    ("sentimentality", Trust, Sadness),
    ("shame", Fear, Disgust),
    ("outrage", Surprise, Anger),
    ("pessimism", Sadness, Anticipation),
    ("morbidness", Disgust, Joy),
    ("dominance", Anger, Trust),
    ("anxiety", Anticipation, Fear),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyad {
    pub name: &'static str,
    pub first: Primary,
    pub second: Primary,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DyadTableError {
    #[error("expected 24 dyads, found {0}")]
    Count(usize),
    #[error("dyad {0:?} is not an emotion column or names a primary")]
    UnknownName(String),
    #[error("dyad {0:?} appears twice")]
    DuplicateName(String),
    #[error("dyad {0:?} pairs an emotion with itself")]
    SelfPair(String),
    #[error("pair ({0}, {1}) is used by more than one dyad")]
    DuplicatePair(Primary, Primary),
    #[error("{0} participates in {1} dyads, expected 6")]
    Participation(Primary, usize),
}

/// Validated mapping from each dyad column to its two primaries, with the
/// column positions resolved once.
#[derive(Debug, Clone)]
pub struct DyadTable {
    dyads: Vec<Dyad>,
    /// For each of the 32 columns, either a primary or a dyad index.
    layout: [ColumnSource; 32],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColumnSource {
    Primary(Primary),
    Dyad(Primary, Primary),
}

impl DyadTable {
    pub fn new(
        entries: impl IntoIterator<Item = (&'static str, Primary, Primary)>,
    ) -> Result<Self, DyadTableError> {
        let dyads: Vec<Dyad> = entries
            .into_iter()
            .map(|(name, first, second)| Dyad {
                name,
                first,
                second,
            })
            .collect();
        if dyads.len() != 24 {
            return Err(DyadTableError::Count(dyads.len()));
        }
        let mut participation = [0usize; 8];
        let mut seen_pairs = std::collections::HashSet::new();
        let mut layout: [Option<ColumnSource>; 32] = [None; 32];
        for p in Primary::ALL {
            let idx = column_index(p.name()).expect("primaries are columns");
            layout[idx] = Some(ColumnSource::Primary(p));
        }
        for d in &dyads {
            if d.first == d.second {
                return Err(DyadTableError::SelfPair(d.name.to_string()));
            }
            let idx = EMOTION_COLUMNS
                .iter()
                .position(|c| *c == d.name)
                .ok_or_else(|| DyadTableError::UnknownName(d.name.to_string()))?;
            match layout[idx] {
                Some(ColumnSource::Primary(_)) => {
                    return Err(DyadTableError::UnknownName(d.name.to_string()))
                }
                Some(ColumnSource::Dyad(..)) => {
                    return Err(DyadTableError::DuplicateName(d.name.to_string()))
                }
                None => {}
            }
            let key = (d.first.min(d.second), d.first.max(d.second));
            if !seen_pairs.insert(key) {
                return Err(DyadTableError::DuplicatePair(key.0, key.1));
            }
            participation[d.first.index()] += 1;
            participation[d.second.index()] += 1;
            layout[idx] = Some(ColumnSource::Dyad(d.first, d.second));
        }
        for p in Primary::ALL {
            if participation[p.index()] != 6 {
                return Err(DyadTableError::Participation(p, participation[p.index()]));
            }
        }
        // 8 primaries + 24 distinct dyad names fill all 32 slots.
        let layout = layout.map(|slot| slot.expect("every column assigned"));
        Ok(DyadTable { dyads, layout })
    }

    pub fn standard() -> Self {
        DyadTable::new(STANDARD_DYADS).expect("standard dyad table is valid")
    }

    pub fn dyads(&self) -> &[Dyad] {
        &self.dyads
    }

    pub fn get(&self, name: &str) -> Option<&Dyad> {
        let idx = column_index(name)?;
        let canonical = EMOTION_COLUMNS[idx];
        self.dyads.iter().find(|d| d.name == canonical)
    }

    pub(crate) fn layout(&self) -> &[ColumnSource; 32] {
        &self.layout
    }
}

impl Default for DyadTable {
    fn default() -> Self {
        Self::standard()
    }
}
