use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sentifuse_core::model::{Branch, ModelConfig, ModelKind};

#[derive(Debug, Parser)]
#[command(name = "sentifuse", version, about = "Multimodal sentiment fusion over precomputed post features")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean, filter and split a raw dataset.
    Prep(PrepArgs),
    /// Train a model and write a checkpoint with its run manifest.
    Train(TrainArgs),
    /// Score a checkpoint on a labelled dataset.
    Eval(EvalArgs),
    /// Print per-record predictions and branch scores.
    Predict(PredictArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
    /// Compare analytic gradients against finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dims {
    Published,
    Desk,
    Tiny,
}

impl Dims {
    pub fn config(self) -> ModelConfig {
        match self {
            Dims::Published => ModelConfig::published(),
            Dims::Desk => ModelConfig::desk(),
            Dims::Tiny => ModelConfig::tiny(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbeddingSource {
    Synthetic,
    File,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Model widths; `published` expects 512-wide region vectors.
    #[arg(long, value_enum, default_value = "published")]
    pub dims: Dims,
    /// Output directory.
    #[arg(long, env = "SENTIFUSE_OUT", default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labelled dataset, split 80/10/10 by seed.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "full", value_parser = parse_kind)]
    pub model: ModelKind,
    /// Train with only this branch.
    #[arg(long, value_parser = parse_branch, conflicts_with = "ablate")]
    pub only: Option<Branch>,
    /// Disable these branches.
    #[arg(long, value_delimiter = ',', value_parser = parse_branch)]
    pub ablate: Vec<Branch>,
    #[arg(long, default_value_t = 150)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    /// Stop after this many epochs without a better validation accuracy.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Keep token order fixed across epochs.
    #[arg(long)]
    pub no_shuffle_tokens: bool,
    #[arg(long, value_enum, default_value = "synthetic")]
    pub embeddings: EmbeddingSource,
    /// Three embedding tables, required with `--embeddings file`.
    #[arg(long, value_delimiter = ',')]
    pub embedding_files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Checkpoint file or run directory.
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, env = "SENTIFUSE_OUT", default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Write JSON lines here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability that a modality shows the label's cue.
    #[arg(long, default_value_t = 0.7)]
    pub signal: f64,
    #[arg(long, value_enum, default_value = "published")]
    pub dims: Dims,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    Op,
    Branch,
    Full,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, value_enum, default_value = "full")]
    pub scope: Scope,
    /// Restrict `--scope op` to one op.
    #[arg(long)]
    pub op: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 1e-5)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "tiny")]
    pub dims: Dims,
    /// Coordinates drawn per parameter; all when absent.
    #[arg(long)]
    pub coords: Option<usize>,
    /// Samples in the checked batch.
    #[arg(long, default_value_t = 4)]
    pub batch: usize,
    /// Adds 1 to the first analytic gradient entry of this parameter.
    #[arg(long, hide = true)]
    pub corrupt: Option<String>,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    s.parse()
}
