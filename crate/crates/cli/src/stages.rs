//! The pipeline stages. Each stage reads its inputs from disk (sources or
//! artifacts of earlier stages) and writes its own artifacts, so any stage
//! can be rerun on its own.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use serde::Serialize;
use thiserror::Error;

use scriptaffect::clustering::{
    composition_audit, elbow_detect, kmeans_best, sse_curve, ward_cluster, CompositionRow,
    GenderCounts,
};
use scriptaffect::corpus::{assemble_corpus, ingest_metadata, CorpusSummary, ParsedScript};
use scriptaffect::emotion::{
    aggregate_character, embed_dialogue, load_lexicon, DyadTable, EmotionLexicon, EMOTION_DIM,
};
use scriptaffect::lexical::{exclusive_nouns, group_frequencies, WordList};
use scriptaffect::parser::{parse_script, CharacterDictionary, InputMode};
use scriptaffect::projection::{tsne, TsneConfig};
use scriptaffect::stats::{
    emotion_test_battery, gender_distribution_over_time, BatteryRow, HigherGroup, TimeBinRow,
};
use scriptaffect::{Corpus, Gender};

use crate::artifacts::*;
use crate::config::{require, KChoice, RunConfig, TestUnit, AUTO_K_MAX};

/// A stage input that predates one of the configured sources.
#[derive(Debug, Error)]
#[error("{} is older than {}; rerun the stage that produces it", artifact.display(), newer.display())]
pub struct StaleInputError {
    pub artifact: PathBuf,
    pub newer: PathBuf,
}

/// Extensions read from the script directory, with the input mode for each.
pub fn input_mode_for(path: &Path) -> Option<InputMode> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "txt" | "fountain" => Some(InputMode::PlainText),
        "jsonl" => Some(InputMode::Positional),
        _ => None,
    }
}

fn script_files(dir: &Path) -> Result<Vec<(String, PathBuf, InputMode)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let Some(mode) = input_mode_for(&path) else {
            continue;
        };
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .with_context(|| format!("non-UTF-8 file name {}", path.display()))?
            .to_string();
        out.push((stem, path, mode));
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    for w in out.windows(2) {
        if w[0].0 == w[1].0 {
            bail!(
                "parse stage: {} and {} map to the same movie {:?}",
                w[0].1.display(),
                w[1].1.display(),
                w[0].0
            );
        }
    }
    Ok(out)
}

fn mtime(path: &Path) -> Option<SystemTime> {
    std::fs::metadata(path).and_then(|m| m.modified()).ok()
}

fn source_files(cfg: &RunConfig, with_lexicon: bool) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Some(dir) = &cfg.script_dir {
        if let Ok(files) = script_files(dir) {
            out.extend(files.into_iter().map(|(_, p, _)| p));
        }
    }
    out.extend(cfg.metadata_path.iter().cloned());
    if with_lexicon {
        out.extend(cfg.lexicon_path.iter().cloned());
    }
    out
}

/// Warns (or fails under `--strict`) when `artifact` is older than any of
/// the configured sources it was derived from.
fn check_fresh(cfg: &RunConfig, artifact: &Path, with_lexicon: bool) -> Result<()> {
    if !artifact.exists() {
        bail!(
            "{} not found; run the earlier stage first",
            artifact.display()
        );
    }
    let Some(built) = mtime(artifact) else {
        return Ok(());
    };
    for src in source_files(cfg, with_lexicon) {
        if mtime(&src).is_some_and(|t| t > built) {
            let err = StaleInputError {
                artifact: artifact.to_path_buf(),
                newer: src,
            };
            if cfg.strict {
                return Err(err.into());
            }
            warn!("{err}");
            return Ok(());
        }
    }
    Ok(())
}

fn out_path(cfg: &RunConfig, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    Ok(cfg.output_dir.join(name))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let path = cfg.output_dir.join(CORPUS_JSON);
    check_fresh(cfg, &path, false)?;
    Corpus::from_json(&read_text(&path)?).with_context(|| format!("loading {}", path.display()))
}

fn load_lexicon_from(cfg: &RunConfig) -> Result<EmotionLexicon> {
    let path = require(&cfg.lexicon_path, "lexicon_path", "lexicon")?;
    let lexicon = load_lexicon(&read_text(path)?)
        .with_context(|| format!("lexicon {}", path.display()))?;
    if lexicon.skipped_phrases() > 0 {
        info!("lexicon: skipped {} multi-word entries", lexicon.skipped_phrases());
    }
    Ok(lexicon)
}

fn load_scored(cfg: &RunConfig) -> Result<(Vec<EmotionRow>, usize)> {
    let path = cfg.output_dir.join(EMOTIONS_CSV);
    check_fresh(cfg, &path, true)?;
    let rows = read_emotions(&path)?;
    let total = rows.len();
    let kept: Vec<EmotionRow> = rows.into_iter().filter(|r| !r.no_affect).collect();
    let excluded = total - kept.len();
    if excluded > 0 {
        info!("{excluded} character(s) without lexicon hits left out");
    }
    Ok((kept, excluded))
}

/// Parses every script, joins metadata and writes characters.json and
/// corpus.json.
pub fn parse(cfg: &RunConfig) -> Result<CorpusSummary> {
    let dir = require(&cfg.script_dir, "script_dir", "scripts")?;
    let meta_path = require(&cfg.metadata_path, "metadata_path", "metadata")?;

    let mut scripts = BTreeMap::new();
    for (movie, path, mode) in script_files(dir)? {
        let text = read_text(&path)?;
        let characters = parse_script(&text, mode, cfg.min_dialogues)
            .with_context(|| format!("parse stage: {}", path.display()))?;
        if characters.is_empty() {
            warn!("{}: no character reaches {} dialogues", path.display(), cfg.min_dialogues);
        }
        scripts.insert(
            movie,
            ParsedScript {
                source: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                characters,
            },
        );
    }
    if scripts.is_empty() {
        bail!("parse stage: no .txt or .jsonl scripts in {}", dir.display());
    }
    let meta = ingest_metadata(&read_text(meta_path)?)
        .with_context(|| format!("corpus stage: {}", meta_path.display()))?;
    let corpus = assemble_corpus(&scripts, &meta)
        .with_context(|| format!("corpus stage: {}", meta_path.display()))?;

    let dictionaries: BTreeMap<&String, &CharacterDictionary> =
        scripts.iter().map(|(m, s)| (m, &s.characters)).collect();
    let mut json = serde_json::to_string_pretty(&dictionaries)?;
    json.push('\n');
    std::fs::write(out_path(cfg, CHARACTERS_JSON)?, json)?;
    std::fs::write(out_path(cfg, CORPUS_JSON)?, corpus.to_json())?;
    Ok(corpus.summary())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreOutcome {
    pub characters: usize,
    pub no_affect: usize,
}

/// Mean 32-d emotion vector per character, written to emotions.csv.
pub fn score(cfg: &RunConfig) -> Result<ScoreOutcome> {
    let lexicon = load_lexicon_from(cfg)?;
    let corpus = load_corpus(cfg)?;
    let table = DyadTable::standard();
    let rows: Vec<EmotionRow> = corpus
        .records
        .iter()
        .map(|r| {
            let e = aggregate_character(r, &lexicon, &table);
            EmotionRow {
                movie: r.movie.clone(),
                name: r.name.clone(),
                gender: r.gender,
                vector: e.vector.0,
                no_affect: e.no_affect,
                dialogue_count: e.dialogue_count,
            }
        })
        .collect();
    write_emotions(&out_path(cfg, EMOTIONS_CSV)?, &rows)?;
    Ok(ScoreOutcome {
        characters: rows.len(),
        no_affect: rows.iter().filter(|r| r.no_affect).count(),
    })
}

fn group_of(g: Gender) -> Option<HigherGroup> {
    match g {
        Gender::Male => Some(HigherGroup::A),
        Gender::Female => Some(HigherGroup::B),
        Gender::Unknown => None,
    }
}

fn group_label(h: HigherGroup) -> &'static str {
    match h {
        HigherGroup::A => "male",
        HigherGroup::B => "female",
        HigherGroup::Neither => "neither",
    }
}

pub const STATS_HEADER: [&str; 8] = [
    "emotion", "n_male", "n_female", "u_male", "u_female", "z", "p_value", "higher_group",
];
pub const TIMEBINS_HEADER: [&str; 6] = ["bin_start", "bin_end", "female", "male", "unknown", "female_pct"];

/// One emotion's test, with the groups named.
#[derive(Debug, Clone, Serialize)]
pub struct StatRow {
    pub emotion: String,
    pub n_male: usize,
    pub n_female: usize,
    pub u_male: f64,
    pub u_female: f64,
    /// `None` when every pooled value is identical.
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub higher_group: &'static str,
}

impl From<&BatteryRow> for StatRow {
    fn from(r: &BatteryRow) -> Self {
        let (z, p_value, higher_group) = match &r.test {
            Ok(t) => (Some(t.z), Some(t.p_value), group_label(r.higher)),
            Err(_) => (None, None, "degenerate"),
        };
        StatRow {
            emotion: r.emotion.clone(),
            n_male: r.n1,
            n_female: r.n2,
            u_male: r.u1,
            u_female: r.u2,
            z,
            p_value,
            higher_group,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsOutcome {
    pub unit: String,
    pub rows: Vec<StatRow>,
    pub time_bins: Vec<TimeBinRow>,
}

/// Male (first group) against female U tests per emotion column, plus the
/// gender-over-time table.
pub fn stats(cfg: &RunConfig) -> Result<StatsOutcome> {
    let corpus = load_corpus(cfg)?;
    let mut matrix: Vec<[f64; EMOTION_DIM]> = Vec::new();
    let mut labels = Vec::new();
    match cfg.test_unit {
        TestUnit::Dialogue => {
            let lexicon = load_lexicon_from(cfg)?;
            let table = DyadTable::standard();
            for r in &corpus.records {
                let Some(group) = group_of(r.gender) else {
                    continue;
                };
                for d in &r.dialogues {
                    let (v, hits) = embed_dialogue(d, &lexicon, &table);
                    if hits > 0 {
                        matrix.push(v.0);
                        labels.push(Some(group));
                    }
                }
            }
        }
        TestUnit::Character => {
            let (rows, _) = load_scored(cfg)?;
            for r in rows {
                matrix.push(r.vector);
                labels.push(group_of(r.gender));
            }
        }
    }

    let path = out_path(cfg, STATS_CSV)?;
    let rows: Vec<StatRow> = match emotion_test_battery(&matrix, &labels) {
        Ok(rows) => rows.iter().map(StatRow::from).collect(),
        Err(e) => {
            warn!("stats stage: {e}; writing an empty {STATS_CSV}");
            Vec::new()
        }
    };
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut w = csv_writer(&path)?;
    w.write_record(STATS_HEADER)?;
    for r in &rows {
        w.write_record([
            r.emotion.clone(),
            r.n_male.to_string(),
            r.n_female.to_string(),
            fmt_f64(r.u_male),
            fmt_f64(r.u_female),
            opt(r.z),
            opt(r.p_value),
            r.higher_group.to_string(),
        ])?;
    }
    w.flush()?;

    let time_bins = gender_distribution_over_time(&corpus, cfg.bin_years);
    let mut w = csv_writer(&out_path(cfg, TIMEBINS_CSV)?)?;
    w.write_record(TIMEBINS_HEADER)?;
    for b in &time_bins {
        w.write_record([
            b.bin_start.to_string(),
            b.bin_end.to_string(),
            b.female.to_string(),
            b.male.to_string(),
            b.unknown.to_string(),
            fmt_f64(b.female_pct),
        ])?;
    }
    w.flush()?;
    Ok(StatsOutcome {
        unit: cfg.test_unit.to_string(),
        rows,
        time_bins,
    })
}

pub const CLUSTERS_HEADER: [&str; 5] = ["movie", "name", "gender", "kmeans_cluster", "ward_cluster"];
pub const COMPOSITION_HEADER: [&str; 9] = [
    "method", "cluster", "female", "male", "unknown", "ratio", "expected_female", "deviation",
    "ratio_factor",
];
pub const SSECURVE_HEADER: [&str; 2] = ["k", "sse"];

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClusterOutcome {
    pub clustered: usize,
    pub excluded_no_affect: usize,
    pub k_mode: String,
    pub chosen_k: Option<usize>,
    pub sse_curve: Vec<(usize, f64)>,
    pub kmeans_sse: Option<f64>,
    pub composition: BTreeMap<String, Vec<CompositionRow>>,
}

fn write_curve(path: &Path, curve: &[(usize, f64)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SSECURVE_HEADER)?;
    for (k, sse) in curve {
        w.write_record([k.to_string(), fmt_f64(*sse)])?;
    }
    w.flush()?;
    Ok(())
}

/// k-means and Ward clustering of the characters that have an emotion
/// vector, with the per-cluster gender audit.
pub fn cluster(cfg: &RunConfig) -> Result<ClusterOutcome> {
    let (rows, excluded) = load_scored(cfg)?;
    let clusters_path = out_path(cfg, CLUSTERS_CSV)?;
    let composition_path = out_path(cfg, COMPOSITION_CSV)?;
    let curve_path = out_path(cfg, SSECURVE_CSV)?;
    let mut outcome = ClusterOutcome {
        clustered: rows.len(),
        excluded_no_affect: excluded,
        k_mode: cfg.k.to_string(),
        ..Default::default()
    };
    let empty = |outcome: ClusterOutcome, reason: String| -> Result<ClusterOutcome> {
        warn!("cluster stage: {reason}; writing header-only cluster tables");
        write_header_only(&clusters_path, &CLUSTERS_HEADER)?;
        write_header_only(&composition_path, &COMPOSITION_HEADER)?;
        write_curve(&curve_path, &outcome.sse_curve)?;
        Ok(outcome)
    };

    let n = rows.len();
    if n < 2 {
        return empty(outcome, format!("{n} character(s) to cluster"));
    }
    let points: Vec<Vec<f64>> = rows.iter().map(|r| r.vector.to_vec()).collect();
    let curve = sse_curve(&points, 1, AUTO_K_MAX.min(n), cfg.seed)?;
    outcome.sse_curve = curve.clone();
    let k = match cfg.k {
        KChoice::Fixed(k) if k > n => {
            return empty(outcome, format!("k = {k} exceeds the {n} characters"));
        }
        KChoice::Fixed(k) => k,
        KChoice::Auto => match elbow_detect(&curve) {
            Ok(k) => k,
            Err(e) => return empty(outcome, format!("cannot choose k: {e}")),
        },
    };
    outcome.chosen_k = Some(k);

    let km = kmeans_best(&points, k, cfg.seed)?;
    let (_, ward) = ward_cluster(&points, k)?;
    outcome.kmeans_sse = Some(km.sse);

    let mut w = csv_writer(&clusters_path)?;
    w.write_record(CLUSTERS_HEADER)?;
    for ((r, a), b) in rows.iter().zip(&km.assignments).zip(&ward) {
        w.write_record([
            r.movie.clone(),
            r.name.clone(),
            r.gender.to_string(),
            a.to_string(),
            b.to_string(),
        ])?;
    }
    w.flush()?;

    let genders: Vec<Gender> = rows.iter().map(|r| r.gender).collect();
    let global = GenderCounts::from_genders(&genders);
    let mut w = csv_writer(&composition_path)?;
    w.write_record(COMPOSITION_HEADER)?;
    for (method, labels) in [("kmeans", &km.assignments), ("ward", &ward)] {
        let audit = composition_audit(labels, &genders, global);
        for c in &audit {
            w.write_record([
                method.to_string(),
                c.cluster.to_string(),
                c.female.to_string(),
                c.male.to_string(),
                c.unknown.to_string(),
                fmt_f64(c.ratio),
                fmt_f64(c.expected_female),
                fmt_f64(c.deviation),
                fmt_f64(c.ratio_factor),
            ])?;
        }
        outcome.composition.insert(method.to_string(), audit);
    }
    w.flush()?;
    write_curve(&curve_path, &curve)?;
    Ok(outcome)
}

pub const TSNE_HEADER: [&str; 5] = ["movie", "name", "gender", "x", "y"];

#[derive(Debug, Clone, Default, Serialize)]
pub struct ProjectOutcome {
    pub points: usize,
    pub perplexity: Option<f64>,
    pub final_kl: Option<f64>,
}

/// Exact t-SNE of the character emotion vectors: tsne.csv and tsne.svg.
pub fn project(cfg: &RunConfig) -> Result<ProjectOutcome> {
    let (rows, _) = load_scored(cfg)?;
    let csv_path = out_path(cfg, TSNE_CSV)?;
    let svg_path = out_path(cfg, TSNE_SVG)?;
    let points: Vec<Vec<f64>> = rows.iter().map(|r| r.vector.to_vec()).collect();
    let config = TsneConfig {
        perplexity: cfg.perplexity,
        seed: cfg.seed,
        ..TsneConfig::default()
    };
    let embedding = match tsne(&points, &config) {
        Ok(e) => e,
        Err(e) => {
            warn!("project stage: {e}; writing an empty projection");
            write_header_only(&csv_path, &TSNE_HEADER)?;
            std::fs::write(&svg_path, render_svg(&[]))?;
            return Ok(ProjectOutcome::default());
        }
    };
    let mut w = csv_writer(&csv_path)?;
    w.write_record(TSNE_HEADER)?;
    let mut plotted = Vec::with_capacity(rows.len());
    for (r, c) in rows.iter().zip(&embedding.coords) {
        w.write_record([
            r.movie.clone(),
            r.name.clone(),
            r.gender.to_string(),
            fmt_f64(c[0]),
            fmt_f64(c[1]),
        ])?;
        plotted.push((*c, r.gender, format!("{} ({})", r.name, r.movie)));
    }
    w.flush()?;
    std::fs::write(&svg_path, render_svg(&plotted))?;
    Ok(ProjectOutcome {
        points: rows.len(),
        perplexity: Some(embedding.perplexity),
        final_kl: embedding.kl_trace.last().map(|&(_, kl)| kl),
    })
}

pub const WORDFREQ_HEADER: [&str; 4] = ["group", "word", "count", "rank"];

fn word_list(path: &Option<PathBuf>, bundled: fn() -> WordList) -> Result<WordList> {
    match path {
        Some(p) => Ok(WordList::parse(&read_text(p)?)),
        None => Ok(bundled()),
    }
}

/// Exclusive nouns per gender group, written to wordfreq.csv.
pub fn words(cfg: &RunConfig) -> Result<BTreeMap<Gender, Vec<(String, u64)>>> {
    let corpus = load_corpus(cfg)?;
    let stopwords = word_list(&cfg.stopwords_path, WordList::bundled_stopwords)?;
    let nouns = word_list(&cfg.nouns_path, WordList::bundled_nouns)?;
    if nouns.is_empty() {
        bail!("words stage: noun list is empty");
    }
    let freq = group_frequencies(&corpus, &stopwords);
    let lists = exclusive_nouns(&freq, &nouns, cfg.top_n);
    let mut w = csv_writer(&out_path(cfg, WORDFREQ_CSV)?)?;
    w.write_record(WORDFREQ_HEADER)?;
    for (gender, list) in &lists {
        for (rank, (word, count)) in list.iter().enumerate() {
            w.write_record([
                gender.to_string(),
                word.clone(),
                count.to_string(),
                (rank + 1).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(lists)
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    version: &'static str,
    generated_at_unix: u64,
    seed: u64,
    min_dialogues: usize,
    summary: CorpusSummary,
    scoring: &'a ScoreOutcome,
    stats: &'a StatsOutcome,
    clustering: &'a ClusterOutcome,
    projection: &'a ProjectOutcome,
    exclusive_nouns: BTreeMap<String, &'a Vec<(String, u64)>>,
    artifacts: Vec<&'static str>,
}

/// Every stage in order, then report.json.
pub fn run_all(cfg: &RunConfig) -> Result<()> {
    require(&cfg.script_dir, "script_dir", "scripts")?;
    require(&cfg.metadata_path, "metadata_path", "metadata")?;
    require(&cfg.lexicon_path, "lexicon_path", "lexicon")?;

    let summary = parse(cfg)?;
    let scoring = score(cfg)?;
    let stats = stats(cfg)?;
    let clustering = cluster(cfg)?;
    let projection = project(cfg)?;
    let nouns = words(cfg)?;

    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        generated_at_unix: SystemTime::now()
            .duration_since(SystemTime::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        seed: cfg.seed,
        min_dialogues: cfg.min_dialogues,
        summary,
        scoring: &scoring,
        stats: &stats,
        clustering: &clustering,
        projection: &projection,
        exclusive_nouns: nouns.iter().map(|(g, l)| (g.to_string(), l)).collect(),
        artifacts: ALL_ARTIFACTS.to_vec(),
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    std::fs::write(out_path(cfg, REPORT_JSON)?, json)?;
    info!(
        "wrote {} artifacts to {}",
        ALL_ARTIFACTS.len(),
        cfg.output_dir.display()
    );
    Ok(())
}
