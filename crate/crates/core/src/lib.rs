//! Screenplay dialogue analysis.
//!
//! The crate turns screenplays into per-character dialogue corpora, embeds
//! each dialogue as a 32-dimensional Plutchik emotion vector, and provides the
//! statistics used to compare character groups: Mann-Whitney U tests,
//! k-means and Ward clustering, exact t-SNE and exclusive-noun contrasts.
//!
//! ```
//! use scriptaffect::emotion::{dyad_expand, score_dialogue, DyadTable, EmotionLexicon, Primary};
//!
//! let lexicon = EmotionLexicon::from_pairs([("furious", Primary::Anger), ("miserable", Primary::Sadness)]);
//! let primary = score_dialogue("Furious and miserable.", &lexicon);
//! let vector = dyad_expand(&primary, &DyadTable::standard());
//! assert_eq!(vector.get("envy"), Some(0.5));
//! ```

pub mod clustering;
pub mod corpus;
pub mod emotion;
pub mod lexical;
pub mod parser;
pub mod projection;
pub mod stats;

pub use corpus::{CharacterRecord, Corpus, Gender};
pub use emotion::{EmotionVector32, EMOTION_COLUMNS};
pub use parser::{CharacterDictionary, InputMode};
