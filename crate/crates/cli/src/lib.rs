//! Command-line pipeline: scripts and metadata in, CSV/JSON/SVG reports out.

pub mod artifacts;
pub mod config;
pub mod stages;

use anyhow::Result;
use clap::{Parser, Subcommand};

pub use config::{KChoice, Overrides, RunConfig, TestUnit};
pub use stages::StaleInputError;

#[derive(Debug, Parser)]
#[command(name = "scriptaffect", version, about = "Emotion and gender analysis of screenplay dialogue")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Parse scripts and join metadata (characters.json, corpus.json)
    Parse,
    /// Score every character's dialogue (emotions.csv)
    Score,
    /// Male vs female U tests and gender over time (stats.csv, timebins.csv)
    Stats,
    /// k-means and Ward clustering (clusters.csv, composition.csv, ssecurve.csv)
    Cluster,
    /// 2-D t-SNE projection (tsne.csv, tsne.svg)
    Project,
    /// Exclusive nouns per gender (wordfreq.csv)
    Words,
    /// Every stage in order, plus report.json
    RunAll,
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::resolve(&cli.overrides)?;
    match cli.command {
        Command::Parse => stages::parse(&cfg).map(drop),
        Command::Score => stages::score(&cfg).map(drop),
        Command::Stats => stages::stats(&cfg).map(drop),
        Command::Cluster => stages::cluster(&cfg).map(drop),
        Command::Project => stages::project(&cfg).map(drop),
        Command::Words => stages::words(&cfg).map(drop),
        Command::RunAll => stages::run_all(&cfg),
    }
}
