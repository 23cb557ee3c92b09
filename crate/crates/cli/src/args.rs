use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "lexred", version, about = "Descriptor-adaptive lexicon reduction for printed subword images")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render the seeded synthetic corpus to PNG files plus a manifest.
    Synth(SynthArgs),
    /// Scan a directory of images into a split manifest.
    Ingest(IngestArgs),
    /// Preprocess manifest images and write train/test feature stores.
    Extract(ExtractArgs),
    /// Label every training sample with its most compatible descriptor.
    Compat(CompatArgs),
    /// Train the descriptor selector.
    Train(TrainArgs),
    /// Reduce the lexicon for one query image.
    Reduce(ReduceArgs),
    /// Evaluate all methods on the test split and write metric CSVs.
    Evaluate(EvaluateArgs),
}

/// Shared by every subcommand: a key=value file whose keys mirror the long
/// flags. Flags given on the command line win.
#[derive(Args, Debug)]
pub struct ConfigArg {
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Comma-separated subset of grid, contour, blocks.
    #[arg(long, default_value = "grid,contour,blocks")]
    pub families: String,
    #[arg(long, default_value_t = 10)]
    pub classes_per_family: usize,
    #[arg(long, default_value_t = 10)]
    pub samples_per_class: usize,
    #[arg(long, default_value_t = 0.75)]
    pub train_ratio: f64,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "DIR")]
    pub dir: PathBuf,
    /// `folder`, `auto`, or the path of a `path,label` CSV table.
    #[arg(long, default_value = "auto")]
    pub labels: String,
    /// Manifest to write; defaults to `<dir>/manifest.csv`.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.75)]
    pub train_ratio: f64,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "FILE")]
    pub manifest: PathBuf,
    /// Receives `train.lxfs` and `test.lxfs`.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompatArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Training feature store.
    #[arg(long, value_name = "FILE")]
    pub store: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Sorted per-descriptor CM curves; defaults to `sorted_cm.csv` beside `--out`.
    #[arg(long, value_name = "FILE")]
    pub curves: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "FILE")]
    pub store: PathBuf,
    /// Compatibility labels written by `compat`.
    #[arg(long, value_name = "FILE")]
    pub labels: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Training report CSV; defaults to `train_report.csv` beside `--out`.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub hidden: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 200)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 20)]
    pub patience: usize,
    #[arg(long, default_value_t = 0.1)]
    pub holdout: f64,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "FILE")]
    pub lexicon: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "IMAGE")]
    pub query: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// adaptive, loci, fourier, zoning or concatenated.
    #[arg(long, default_value = "adaptive")]
    pub method: String,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "FILE")]
    pub lexicon: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub test: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Comma-separated methods; all five by default.
    #[arg(long, default_value = "loci,fourier,zoning,concatenated,adaptive")]
    pub methods: String,
    /// Comma-separated cutoffs n; a default grid is derived from the lexicon size.
    #[arg(long)]
    pub grid: Option<String>,
}
