use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use scriptaffect::lexical::DEFAULT_TOP_N;
use scriptaffect::parser::DEFAULT_MIN_DIALOGUES;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PERPLEXITY: f64 = 30.0;
pub const DEFAULT_BIN_YEARS: u32 = 5;
pub const DEFAULT_OUTPUT_DIR: &str = "out";
/// Largest k tried when choosing k automatically.
pub const AUTO_K_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            _ => Err(format!("k must be \"auto\" or a positive integer, got {s:?}")),
        }
    }
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Auto => f.write_str("auto"),
            KChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl<'de> Deserialize<'de> for KChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) if k >= 1 => Ok(KChoice::Fixed(k as usize)),
            Raw::Int(k) => Err(serde::de::Error::custom(format!("k must be positive, got {k}"))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Unit of observation for the U tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestUnit {
    #[default]
    Dialogue,
    Character,
}

impl FromStr for TestUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dialogue" => Ok(TestUnit::Dialogue),
            "character" => Ok(TestUnit::Character),
            other => Err(format!("test_unit must be dialogue or character, got {other:?}")),
        }
    }
}

impl fmt::Display for TestUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestUnit::Dialogue => "dialogue",
            TestUnit::Character => "character",
        })
    }
}

/// Keys accepted in the config file. Relative paths are resolved against the
/// directory containing the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    script_dir: Option<PathBuf>,
    metadata_path: Option<PathBuf>,
    lexicon_path: Option<PathBuf>,
    nouns_path: Option<PathBuf>,
    stopwords_path: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    min_dialogues: Option<usize>,
    k: Option<KChoice>,
    seed: Option<u64>,
    perplexity: Option<f64>,
    bin_years: Option<u32>,
    test_unit: Option<TestUnit>,
    top_n: Option<usize>,
}

/// Command-line overrides; every flag beats the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Config file with `key = value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory of scripts (`.txt` plain text, `.jsonl` positional)
    #[arg(long, global = true)]
    pub scripts: Option<PathBuf>,
    /// CSV with movie,character,gender,year
    #[arg(long, global = true)]
    pub metadata: Option<PathBuf>,
    /// Word-emotion association lexicon (word<TAB>affect<TAB>0|1)
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    pub min_dialogues: Option<usize>,
    /// Number of clusters, or "auto" for the elbow of the SSE curve
    #[arg(long, global = true)]
    pub k: Option<KChoice>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub perplexity: Option<f64>,
    #[arg(long, global = true)]
    pub bin_years: Option<u32>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Treat stale stage inputs as errors instead of warnings
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub script_dir: Option<PathBuf>,
    pub metadata_path: Option<PathBuf>,
    pub lexicon_path: Option<PathBuf>,
    pub nouns_path: Option<PathBuf>,
    pub stopwords_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub min_dialogues: usize,
    pub k: KChoice,
    pub seed: u64,
    pub perplexity: f64,
    pub bin_years: u32,
    pub test_unit: TestUnit,
    pub top_n: usize,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            script_dir: None,
            metadata_path: None,
            lexicon_path: None,
            nouns_path: None,
            stopwords_path: None,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            min_dialogues: DEFAULT_MIN_DIALOGUES,
            k: KChoice::Auto,
            seed: DEFAULT_SEED,
            perplexity: DEFAULT_PERPLEXITY,
            bin_years: DEFAULT_BIN_YEARS,
            test_unit: TestUnit::Dialogue,
            top_n: DEFAULT_TOP_N,
            strict: false,
        }
    }
}

impl RunConfig {
    /// Defaults, then the config file (if any), then flags.
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: FileConfig = toml::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            let base = path.parent().unwrap_or(Path::new(""));
            cfg.apply_file(file, base);
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, f: FileConfig, base: &Path) {
        let rel = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        if let Some(p) = f.script_dir {
            self.script_dir = Some(rel(p));
        }
        if let Some(p) = f.metadata_path {
            self.metadata_path = Some(rel(p));
        }
        if let Some(p) = f.lexicon_path {
            self.lexicon_path = Some(rel(p));
        }
        if let Some(p) = f.nouns_path {
            self.nouns_path = Some(rel(p));
        }
        if let Some(p) = f.stopwords_path {
            self.stopwords_path = Some(rel(p));
        }
        if let Some(p) = f.output_dir {
            self.output_dir = rel(p);
        }
        if let Some(v) = f.min_dialogues {
            self.min_dialogues = v;
        }
        if let Some(v) = f.k {
            self.k = v;
        }
        if let Some(v) = f.seed {
            self.seed = v;
        }
        if let Some(v) = f.perplexity {
            self.perplexity = v;
        }
        if let Some(v) = f.bin_years {
            self.bin_years = v;
        }
        if let Some(v) = f.test_unit {
            self.test_unit = v;
        }
        if let Some(v) = f.top_n {
            self.top_n = v;
        }
    }

    fn apply_flags(&mut self, o: &Overrides) {
        if o.scripts.is_some() {
            self.script_dir = o.scripts.clone();
        }
        if o.metadata.is_some() {
            self.metadata_path = o.metadata.clone();
        }
        if o.lexicon.is_some() {
            self.lexicon_path = o.lexicon.clone();
        }
        if let Some(p) = &o.out {
            self.output_dir = p.clone();
        }
        if let Some(v) = o.min_dialogues {
            self.min_dialogues = v;
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.perplexity {
            self.perplexity = v;
        }
        if let Some(v) = o.bin_years {
            self.bin_years = v;
        }
        self.strict |= o.strict;
    }

    fn validate(&self) -> Result<()> {
        if !(self.perplexity.is_finite() && self.perplexity > 0.0) {
            bail!("perplexity must be positive, got {}", self.perplexity);
        }
        if self.bin_years == 0 {
            bail!("bin_years must be at least 1");
        }
        if self.top_n == 0 {
            bail!("top_n must be at least 1");
        }
        Ok(())
    }
}

/// Returns the configured path, failing with a message naming the missing
/// setting or file.
pub fn require<'a>(path: &'a Option<PathBuf>, key: &str, flag: &str) -> Result<&'a Path> {
    let Some(p) = path else {
        bail!("{key} is not set (use --{flag} or `{key}` in the config file)");
    };
    if !p.exists() {
        bail!("{key} {} does not exist", p.display());
    }
    Ok(p)
}
