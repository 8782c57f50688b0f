use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "loire",
    version,
    about = "Robust regression, outlier isolation and low-rank background modeling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a linear model to a CSV table with one or more robust estimators
    Regress(RegressArgs),
    /// Run synthetic low-rank plus sparse benchmarks and write report.csv
    Simulate(SimulateArgs),
    /// Separate a PGM frame sequence into background and foreground
    Bgmodel(BgmodelArgs),
    /// Print version information
    Version(VersionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegressMethod {
    Loire,
    Appbem,
    Ols,
    Lad,
    Oracle,
}

impl RegressMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Loire => "loire",
            Self::Appbem => "appbem",
            Self::Ols => "ols",
            Self::Lad => "lad",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixMethod {
    Rrf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Uniform,
    Gaussian,
}

/// Options shared by the iterative solvers. Unset values fall back to
/// per-problem defaults.
#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Penalty weight; the shrinkage threshold is 1/lambda
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Stop when the outlier update moves less than this
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Entries with magnitude at most this count as zero
    #[arg(long)]
    pub zero_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputFlags {
    /// Output directory, created if missing
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Write 0 for every wall-clock time so outputs are byte-reproducible
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RegressArgs {
    /// CSV file with a header row
    pub csv: PathBuf,
    /// Response column; every other column is a predictor
    #[arg(long)]
    pub target: String,
    /// Append a constant predictor
    #[arg(long)]
    pub intercept: bool,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "appbem")]
    pub method: Vec<RegressMethod>,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Residual radius for the exhaustive oracle
    #[arg(long)]
    pub radius: Option<f64>,
    /// Largest outlier set the oracle enumerates (default: all rows)
    #[arg(long)]
    pub max_support: Option<usize>,
    /// ADMM step parameter for lad
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Matrix sizes, comma separated
    #[arg(long = "n", value_delimiter = ',', default_value = "100")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub rank_frac: f64,
    /// Fraction of corrupted entries
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
    /// Spike magnitude scale
    #[arg(long, default_value_t = 10.0)]
    pub amplitude: f64,
    /// Dense noise scale (uniform range, or variance for gaussian)
    #[arg(long, default_value_t = 2.0)]
    pub dense_scale: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    pub noise: NoiseKind,
    /// Use L = P Q^T instead of L = P P^T
    #[arg(long)]
    pub asymmetric: bool,
    /// First seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds per size
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rrf")]
    pub method: Vec<MatrixMethod>,
    /// Use lambda = MULT * sqrt(max(m, n)) / ||Y||_F instead of thresholding
    /// at the dense noise span; ignored when --lambda is given
    #[arg(long)]
    pub lambda_mult: Option<f64>,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Clone, Args)]
pub struct BgmodelArgs {
    /// Glob matching the frames, read in sorted path order
    pub frames: String,
    /// 1 for a static background, about 3 for changing illumination
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Multiplier on sqrt(max(m, n)) / ||Y||_F when --lambda is not given
    #[arg(long, default_value_t = 20.0)]
    pub lambda_mult: f64,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Clone, Args)]
pub struct VersionArgs {
    #[arg(long)]
    pub json: bool,
}
