use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "connecto", version, about = "Benchmark and run connectome evolution prediction pipelines")]
pub struct Cli {
    /// Worker threads for pipeline, fold and per-feature fits (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Repeat for more logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit, score, cross-validate and rank pipelines.
    Bench(BenchArgs),
    /// Predict follow-up connectomes with a saved or freshly fitted pipeline.
    Predict(PredictArgs),
    /// Write a synthetic train/test dataset.
    Synth(SynthArgs),
    /// Print a bundled team configuration.
    Config(ConfigArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PccModeArg {
    Flattened,
    PerSubject,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregatorArg {
    Mean,
    Product,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TtestArg {
    PerSubject,
    PerFold,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub train_t0: PathBuf,
    #[arg(long)]
    pub train_t1: PathBuf,
    #[arg(long)]
    pub test_t0: PathBuf,
    #[arg(long)]
    pub test_t1_public: Option<PathBuf>,
    #[arg(long)]
    pub test_t1_private: Option<PathBuf>,
    /// Bundled team ids (`all` or a comma list such as `1,2,11`).
    #[arg(long, default_value = "all")]
    pub pipelines: String,
    /// Extra pipeline config files, run alongside the selected teams.
    #[arg(long = "config")]
    pub configs: Vec<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Overridden by the CONNECTO_SEED environment variable.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PccModeArg::Flattened)]
    pub pcc_mode: PccModeArg,
    #[arg(long, value_enum, default_value_t = AggregatorArg::Mean)]
    pub aggregator: AggregatorArg,
    #[arg(long, value_enum, default_value_t = TtestArg::PerSubject)]
    pub ttest: TtestArg,
    /// Also write per-subject residual matrices under `residuals/<team>/`.
    #[arg(long)]
    pub residuals: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Fitted pipeline written by `--save-model`.
    #[arg(long, conflicts_with_all = ["config", "team"])]
    pub model: Option<PathBuf>,
    #[arg(long, conflicts_with = "team")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub team: Option<u32>,
    #[arg(long)]
    pub train_t0: Option<PathBuf>,
    #[arg(long)]
    pub train_t1: Option<PathBuf>,
    /// Overridden by the CONNECTO_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Store the fitted pipeline for later `--model` runs.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Training subjects.
    #[arg(long, default_value_t = 150)]
    pub subjects: usize,
    /// Test subjects, split evenly into public and private halves.
    #[arg(long, default_value_t = 80)]
    pub test_subjects: usize,
    #[arg(long, default_value_t = 35)]
    pub rois: usize,
    #[arg(long, default_value_t = 0.1)]
    pub drift: f64,
    #[arg(long, default_value_t = 0.02)]
    pub noise: f64,
    /// Overridden by the CONNECTO_SEED environment variable.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub team: u32,
}
