//! On-disk formats shared between stages.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use scriptaffect::emotion::{EMOTION_COLUMNS, EMOTION_DIM};
use scriptaffect::Gender;

pub const CHARACTERS_JSON: &str = "characters.json";
pub const CORPUS_JSON: &str = "corpus.json";
pub const EMOTIONS_CSV: &str = "emotions.csv";
pub const STATS_CSV: &str = "stats.csv";
pub const TIMEBINS_CSV: &str = "timebins.csv";
pub const CLUSTERS_CSV: &str = "clusters.csv";
pub const COMPOSITION_CSV: &str = "composition.csv";
pub const SSECURVE_CSV: &str = "ssecurve.csv";
pub const TSNE_CSV: &str = "tsne.csv";
pub const TSNE_SVG: &str = "tsne.svg";
pub const WORDFREQ_CSV: &str = "wordfreq.csv";
pub const REPORT_JSON: &str = "report.json";

pub const ALL_ARTIFACTS: [&str; 12] = [
    CHARACTERS_JSON,
    CORPUS_JSON,
    EMOTIONS_CSV,
    STATS_CSV,
    TIMEBINS_CSV,
    CLUSTERS_CSV,
    COMPOSITION_CSV,
    SSECURVE_CSV,
    TSNE_CSV,
    TSNE_SVG,
    WORDFREQ_CSV,
    REPORT_JSON,
];

/// Shortest round-trip decimal, with `inf`, `-inf` and `nan` spelled out.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))
}

pub fn write_header_only(path: &Path, header: &[&str]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    w.flush()?;
    Ok(())
}

pub fn emotions_header() -> Vec<&'static str> {
    let mut h = vec!["movie", "name", "gender"];
    h.extend(EMOTION_COLUMNS);
    h.extend(["no_affect", "dialogue_count"]);
    h
}

/// One row of emotions.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionRow {
    pub movie: String,
    pub name: String,
    pub gender: Gender,
    pub vector: [f64; EMOTION_DIM],
    pub no_affect: bool,
    pub dialogue_count: usize,
}

pub fn write_emotions(path: &Path, rows: &[EmotionRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(emotions_header())?;
    for r in rows {
        let mut rec = vec![r.movie.clone(), r.name.clone(), r.gender.to_string()];
        rec.extend(r.vector.iter().map(|&v| fmt_f64(v)));
        rec.push(r.no_affect.to_string());
        rec.push(r.dialogue_count.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_emotions(path: &Path) -> Result<Vec<EmotionRow>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != emotions_header() {
        bail!("{}: unexpected header", path.display());
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let ctx = || format!("{} line {line}", path.display());
        let gender: Gender = rec[2].parse().map_err(anyhow::Error::msg).with_context(ctx)?;
        let mut vector = [0.0; EMOTION_DIM];
        for (c, v) in vector.iter_mut().enumerate() {
            *v = rec[3 + c].parse().with_context(ctx)?;
        }
        rows.push(EmotionRow {
            movie: rec[0].to_string(),
            name: rec[1].to_string(),
            gender,
            vector,
            no_affect: rec[3 + EMOTION_DIM].parse().with_context(ctx)?,
            dialogue_count: rec[4 + EMOTION_DIM].parse().with_context(ctx)?,
        });
    }
    Ok(rows)
}

fn colour(g: Gender) -> &'static str {
    match g {
        Gender::Female => "#d62728",
        Gender::Male => "#1f77b4",
        Gender::Unknown => "#7f7f7f",
    }
}

/// Scatter plot of a 2-D embedding, one circle per point coloured by gender.
pub fn render_svg(points: &[([f64; 2], Gender, String)]) -> String {
    const SIZE: f64 = 800.0;
    const MARGIN: f64 = 40.0;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (c, _, _) in points {
        for d in 0..2 {
            lo[d] = lo[d].min(c[d]);
            hi[d] = hi[d].max(c[d]);
        }
    }
    let span = |d: usize| {
        let s = hi[d] - lo[d];
        if s > 0.0 { s } else { 1.0 }
    };
    let scale = (SIZE - 2.0 * MARGIN) / span(0).max(span(1));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for (c, g, label) in points {
        let x = MARGIN + (c[0] - lo[0]) * scale;
        // SVG y grows downwards
        let y = SIZE - MARGIN - (c[1] - lo[1]) * scale;
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="5" fill="{}"><title>{}</title></circle>"#,
            colour(*g),
            escape(label)
        );
    }
    for (i, g) in [Gender::Female, Gender::Male, Gender::Unknown].into_iter().enumerate() {
        let y = 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="20" cy="{y}" r="5" fill="{}"/><text x="32" y="{}" font-family="sans-serif" font-size="12">{g}</text>"#,
            colour(g),
            y + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
