use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::range::{Bounds, Range};

#[derive(Debug, Parser)]
#[command(
    name = "envyline",
    version,
    about = "Envy-ratio facility location on [0, 1]: guarantee tables, error curves and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form consistency/robustness rows for a parameter grid.
    Frontier(FrontierArgs),
    /// The α-BIM error curve over a grid of error bounds η.
    Curve(CurveArgs),
    /// Search the (α, p) parameters of the LRM constant mechanism.
    OptimizeLrm(OptimizeLrmArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrontierMechanism {
    Bim,
    Birm,
    Bam,
    Balrm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Guarantees,
    Sp,
    Reduction,
    Invariants,
    Lowerbound,
    Dominance,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    /// Comma-separated mechanisms.
    #[arg(long, value_delimiter = ',', required = true)]
    pub mech: Vec<FrontierMechanism>,
    /// α grid `lo:hi:step` or a single value [default: 1:2:0.01, 1.01:2:0.01 for birm].
    #[arg(long)]
    pub alpha: Option<Range>,
    /// Bias grid `lo:hi:step` or a single value [default: 0:0.5:0.01].
    #[arg(long)]
    pub c: Option<Range>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 1e-2)]
    pub coarse_step: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub refine_step: f64,
    /// Zoom radius around coarse maxima [default: 2 × coarse step].
    #[arg(long)]
    pub refine_radius: Option<f64>,
    #[arg(long, default_value_t = 5e-3)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub alpha: f64,
    /// η grid `lo:hi:step` or a single value.
    #[arg(long)]
    pub eta: Range,
    /// Also measure the curve by adversarial search.
    #[arg(long)]
    pub empirical: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeLrmArgs {
    #[arg(long, default_value = "0:0.25")]
    pub alpha_bounds: Bounds,
    #[arg(long, default_value = "0:0.5")]
    pub p_bounds: Bounds,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Random trials per property test.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}
