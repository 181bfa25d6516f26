//! Indentation-driven screenplay parsing.
//!
//! A script is first turned into a sequence of [`RawBlock`]s, either from plain
//! text (indentation = leading columns) or from positional JSON-lines where each
//! block carries the pixel offset of an extracted HTML element. The three most
//! common offsets define the action / dialogue / cue columns, blocks are
//! classified against them, and dialogue runs are collected per speaker.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default minimum number of dialogues a character needs to be kept.
pub const DEFAULT_MIN_DIALOGUES: usize = 5;

const TAB_STOP: usize = 8;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("indent profile needs 3 distinct offset levels, found {found}")]
    Profile { found: usize },
    #[error("character name is empty after normalization: {raw:?}")]
    Name { raw: String },
    #[error("positional input line {line}: {message}")]
    Positional { line: usize, message: String },
    #[error("character dictionary JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// How the `left` coordinate of a block was measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputMode {
    /// Leading columns of a plain-text line.
    PlainText,
    /// Pixel offsets from positional JSON-lines.
    Positional,
}

impl InputMode {
    /// Maximum distance between a block's offset and a profile level for the
    /// block to count as sitting on that level.
    pub fn tolerance(self) -> u32 {
        match self {
            InputMode::PlainText => 2,
            InputMode::Positional => 8,
        }
    }
}

/// One positioned piece of script text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawBlock {
    pub text: String,
    pub left: u32,
    pub order: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    SceneHeading,
    Action,
    CharacterCue,
    Dialogue,
    Parenthetical,
    Other,
}

/// The three indentation levels of a script, ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndentProfile {
    pub action_indent: u32,
    pub dialogue_indent: u32,
    pub cue_indent: u32,
    pub tolerance: u32,
}

impl IndentProfile {
    fn matches(&self, left: u32, level: u32) -> bool {
        left.abs_diff(level) <= self.tolerance
    }
}

/// Speaker name to that speaker's dialogues, in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterDictionary {
    pub entries: BTreeMap<String, Vec<String>>,
}

impl CharacterDictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dialogue_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Pretty JSON object of name to dialogue array, keys sorted, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("string map serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Splits plain text into blocks, one per non-blank line. `left` is the
/// number of leading columns with tabs expanded to 8-column stops.
pub fn blocks_from_plain_text(text: &str) -> Vec<RawBlock> {
    let mut blocks = Vec::new();
    for line in text.lines() {
        let mut col = 0usize;
        let mut body_start = line.len();
        for (idx, ch) in line.char_indices() {
            match ch {
                ' ' => col += 1,
                '\t' => col = (col / TAB_STOP + 1) * TAB_STOP,
                '\u{feff}' => {}
                _ => {
                    body_start = idx;
                    break;
                }
            }
        }
        let body = line[body_start..].trim_end();
        if body.is_empty() {
            continue;
        }
        blocks.push(RawBlock {
            text: body.to_string(),
            left: u32::try_from(col).unwrap_or(u32::MAX),
            order: u32::try_from(blocks.len()).unwrap_or(u32::MAX),
        });
    }
    blocks
}

#[derive(Deserialize)]
struct PositionalLine {
    text: String,
    left: i64,
    top: i64,
    #[serde(default)]
    page: i64,
}

/// Parses positional JSON-lines (`{"text", "left", "top"}` with an optional
/// `page`) into blocks ordered by `(page, top)`, input order breaking ties.
pub fn blocks_from_positional(text: &str) -> Result<Vec<RawBlock>, ParseError> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: PositionalLine =
            serde_json::from_str(line).map_err(|e| ParseError::Positional {
                line: idx + 1,
                message: e.to_string(),
            })?;
        let left = u32::try_from(row.left).map_err(|_| ParseError::Positional {
            line: idx + 1,
            message: format!("left offset {} out of range", row.left),
        })?;
        rows.push((row.page, row.top, rows.len(), row.text, left));
    }
    rows.sort_by_key(|r| (r.0, r.1, r.2));

    let mut blocks = Vec::with_capacity(rows.len());
    for (_, _, _, text, left) in rows {
        let text = collapse_whitespace(&text);
        if text.is_empty() {
            continue;
        }
        blocks.push(RawBlock {
            text,
            left,
            order: u32::try_from(blocks.len()).unwrap_or(u32::MAX),
        });
    }
    Ok(blocks)
}

/// Picks the three most frequent offsets and assigns them, ascending, to
/// action, dialogue and cue. Offsets within tolerance of an already chosen
/// level are folded into it rather than becoming a level of their own.
pub fn infer_indent_profile(
    blocks: &[RawBlock],
    mode: InputMode,
) -> Result<IndentProfile, ParseError> {
    let tolerance = mode.tolerance();
    let mut histogram: HashMap<u32, usize> = HashMap::new();
    for block in blocks {
        *histogram.entry(block.left).or_default() += 1;
    }
    let mut by_freq: Vec<(u32, usize)> = histogram.into_iter().collect();
    by_freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut levels: Vec<u32> = Vec::with_capacity(3);
    for (left, _) in by_freq {
        if levels.iter().any(|&l| l.abs_diff(left) <= tolerance) {
            continue;
        }
        levels.push(left);
        if levels.len() == 3 {
            break;
        }
    }
    if levels.len() < 3 {
        return Err(ParseError::Profile {
            found: levels.len(),
        });
    }
    levels.sort_unstable();
    Ok(IndentProfile {
        action_indent: levels[0],
        dialogue_indent: levels[1],
        cue_indent: levels[2],
        tolerance,
    })
}

fn is_slugline(text: &str) -> bool {
    let upper = text.trim_start().to_uppercase();
    ["INT.", "EXT.", "INT/EXT", "I/E.", "EXT/INT"]
        .iter()
        .any(|p| upper.starts_with(p))
}

fn is_wrapped_in_parens(text: &str) -> bool {
    let t = text.trim();
    t.len() >= 2 && t.starts_with('(') && t.ends_with(')')
}

/// All-caps test for cues: parenthetical groups such as `(cont'd)` are
/// ignored, at least one letter must remain and none may be lowercase.
/// Transitions (`CUT TO:`) are rejected.
fn looks_like_cue(text: &str) -> bool {
    let bare = strip_paren_groups(text);
    let bare = bare.trim();
    if bare.ends_with(':') {
        return false;
    }
    let mut has_letter = false;
    for ch in bare.chars() {
        if ch.is_lowercase() {
            return false;
        }
        if ch.is_alphabetic() {
            has_letter = true;
        }
    }
    has_letter
}

pub fn classify_block(block: &RawBlock, profile: &IndentProfile) -> BlockKind {
    let left = block.left;
    if profile.matches(left, profile.cue_indent) && looks_like_cue(&block.text) {
        BlockKind::CharacterCue
    } else if profile.matches(left, profile.dialogue_indent) {
        if is_wrapped_in_parens(&block.text) {
            BlockKind::Parenthetical
        } else {
            BlockKind::Dialogue
        }
    } else if left > profile.dialogue_indent
        && left < profile.cue_indent
        && is_wrapped_in_parens(&block.text)
    {
        // typed scripts often indent parentheticals between dialogue and cue
        BlockKind::Parenthetical
    } else if profile.matches(left, profile.action_indent) {
        if is_slugline(&block.text) {
            BlockKind::SceneHeading
        } else {
            BlockKind::Action
        }
    } else {
        BlockKind::Other
    }
}

pub fn classify_blocks(
    blocks: &[RawBlock],
    profile: &IndentProfile,
) -> Vec<(RawBlock, BlockKind)> {
    blocks
        .iter()
        .map(|b| (b.clone(), classify_block(b, profile)))
        .collect()
}

fn strip_paren_groups(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = 0usize;
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            ')' => {}
            _ if depth == 0 => out.push(ch),
            _ => {}
        }
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

const BARE_SUFFIXES: [&str; 6] = ["CONT'D", "CONT\u{2019}D", "CONT.", "V.O.", "O.S.", "O.C."];

/// Uppercases, drops every `(...)` group and bare voice-over / continuation
/// markers, and collapses whitespace.
pub fn normalize_character_name(raw: &str) -> Result<String, ParseError> {
    let upper = strip_paren_groups(raw).to_uppercase();
    let mut words: Vec<&str> = upper.split_whitespace().collect();
    while let Some(last) = words.last() {
        if words.len() > 1 && BARE_SUFFIXES.contains(last) {
            words.pop();
        } else {
            break;
        }
    }
    if words.len() == 1 && BARE_SUFFIXES.contains(&words[0]) {
        words.clear();
    }
    let name = words.join(" ");
    if name.is_empty() {
        return Err(ParseError::Name {
            raw: raw.to_string(),
        });
    }
    Ok(name)
}

/// Collects dialogue runs per speaker. Consecutive dialogue blocks after a cue
/// are joined with one space; parentheticals are skipped without ending the
/// run; any other block kind ends it. Dialogue without a preceding cue, or
/// after a cue whose name normalizes to nothing, is discarded.
pub fn build_character_dictionary(classified: &[(RawBlock, BlockKind)]) -> CharacterDictionary {
    let mut dict = CharacterDictionary::default();
    let mut speaker: Option<String> = None;
    let mut pending: Vec<String> = Vec::new();

    fn flush(dict: &mut CharacterDictionary, speaker: &Option<String>, pending: &mut Vec<String>) {
        if let Some(name) = speaker {
            let line = collapse_whitespace(&pending.join(" "));
            if !line.is_empty() {
                dict.entries.entry(name.clone()).or_default().push(line);
            }
        }
        pending.clear();
    }

    for (block, kind) in classified {
        match kind {
            BlockKind::CharacterCue => {
                flush(&mut dict, &speaker, &mut pending);
                speaker = normalize_character_name(&block.text).ok();
            }
            BlockKind::Dialogue => {
                if speaker.is_some() {
                    pending.push(block.text.clone());
                }
            }
            BlockKind::Parenthetical => {}
            BlockKind::SceneHeading | BlockKind::Action | BlockKind::Other => {
                flush(&mut dict, &speaker, &mut pending);
                speaker = None;
            }
        }
    }
    flush(&mut dict, &speaker, &mut pending);
    dict
}

pub fn filter_min_dialogues(dict: &CharacterDictionary, threshold: usize) -> CharacterDictionary {
    CharacterDictionary {
        entries: dict
            .entries
            .iter()
            .filter(|(_, lines)| lines.len() >= threshold)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
    }
}

/// Full parse of one script's text: blocks, profile, classification,
/// dictionary, minimum-dialogue filter.
pub fn parse_script(
    text: &str,
    mode: InputMode,
    min_dialogues: usize,
) -> Result<CharacterDictionary, ParseError> {
    let blocks = match mode {
        InputMode::PlainText => blocks_from_plain_text(text),
        InputMode::Positional => blocks_from_positional(text)?,
    };
    let profile = infer_indent_profile(&blocks, mode)?;
    let classified = classify_blocks(&blocks, &profile);
    Ok(filter_min_dialogues(
        &build_character_dictionary(&classified),
        min_dialogues,
    ))
}
