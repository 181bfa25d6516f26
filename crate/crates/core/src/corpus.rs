//! Joining parsed character dictionaries with gender/year metadata.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::{normalize_character_name, CharacterDictionary};

pub const MIN_YEAR: i32 = 1870;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("metadata row {row}: {message}")]
    Metadata { row: usize, message: String },
    #[error("movie {movie:?} has no metadata rows")]
    Assembly { movie: String },
    #[error("corpus JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Unknown,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" => Ok(Gender::Female),
            "male" => Ok(Gender::Male),
            "unknown" => Ok(Gender::Unknown),
            other => Err(format!("unrecognised gender {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub name: String,
    pub movie: String,
    pub year: i32,
    pub gender: Gender,
    pub dialogues: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterMeta {
    pub gender: Gender,
    pub year: i32,
}

/// `(movie, normalized character name)` to that character's metadata.
pub type MetadataMap = BTreeMap<(String, String), CharacterMeta>;

/// Reads `movie,character,gender,year` rows. Character names go through the
/// same normalization as script cues so `Harry (V.O.)` and `HARRY` collide.
/// Row numbers in errors count the header as row 1.
pub fn ingest_metadata(csv_source: &str) -> Result<MetadataMap, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(csv_source.as_bytes());

    let header_err = |message: String| CorpusError::Metadata { row: 1, message };
    let headers = reader
        .headers()
        .map_err(|e| header_err(e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect::<Vec<_>>();
    if headers != ["movie", "character", "gender", "year"] {
        return Err(header_err(format!(
            "expected header movie,character,gender,year, found {}",
            headers.join(",")
        )));
    }

    let mut out = MetadataMap::new();
    let mut years: HashMap<String, i32> = HashMap::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let err = |message: String| CorpusError::Metadata { row, message };
        let record = record.map_err(|e| err(e.to_string()))?;
        if record.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", record.len())));
        }
        let movie = record[0].to_string();
        if movie.is_empty() {
            return Err(err("empty movie".into()));
        }
        let name = normalize_character_name(&record[1]).map_err(|e| err(e.to_string()))?;
        let gender: Gender = record[2].parse().map_err(err)?;
        let year: i32 = record[3]
            .parse()
            .map_err(|_| err(format!("invalid year {:?}", &record[3])))?;
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            return Err(err(format!("year {year} outside {MIN_YEAR}..={MAX_YEAR}")));
        }
        let first_year = *years.entry(movie.clone()).or_insert(year);
        if first_year != year {
            return Err(err(format!(
                "movie {movie:?} listed with years {first_year} and {year}"
            )));
        }
        if out
            .insert((movie.clone(), name.clone()), CharacterMeta { gender, year })
            .is_some()
        {
            return Err(err(format!("duplicate entry for ({movie}, {name})")));
        }
    }
    Ok(out)
}

/// A parsed script together with the file it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedScript {
    pub source: String,
    pub characters: CharacterDictionary,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub movies: usize,
    pub characters: usize,
    pub dialogues: usize,
    pub female: usize,
    pub male: usize,
    pub unknown: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub records: Vec<CharacterRecord>,
    pub provenance: BTreeMap<String, String>,
}

impl Corpus {
    pub fn summary(&self) -> CorpusSummary {
        let mut s = CorpusSummary {
            movies: self.provenance.len(),
            characters: self.records.len(),
            ..Default::default()
        };
        for r in &self.records {
            s.dialogues += r.dialogues.len();
            match r.gender {
                Gender::Female => s.female += 1,
                Gender::Male => s.male += 1,
                Gender::Unknown => s.unknown += 1,
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("corpus serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Builds one record per character. Characters missing from the metadata get
/// [`Gender::Unknown`] and the year of their movie; a movie without any
/// metadata row is an error. Records come out sorted by (movie, name).
pub fn assemble_corpus(
    scripts: &BTreeMap<String, ParsedScript>,
    meta: &MetadataMap,
) -> Result<Corpus, CorpusError> {
    let mut movie_years: HashMap<&str, i32> = HashMap::new();
    for ((movie, _), m) in meta {
        movie_years.entry(movie.as_str()).or_insert(m.year);
    }

    let mut corpus = Corpus::default();
    for (movie, script) in scripts {
        let year = *movie_years
            .get(movie.as_str())
            .ok_or_else(|| CorpusError::Assembly {
                movie: movie.clone(),
            })?;
        corpus.provenance.insert(movie.clone(), script.source.clone());
        for (name, dialogues) in &script.characters.entries {
            let gender = meta
                .get(&(movie.clone(), name.clone()))
                .map_or(Gender::Unknown, |m| m.gender);
            corpus.records.push(CharacterRecord {
                name: name.clone(),
                movie: movie.clone(),
                year,
                gender,
                dialogues: dialogues.clone(),
            });
        }
    }
    Ok(corpus)
}
