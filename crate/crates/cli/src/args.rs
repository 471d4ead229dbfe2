use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hotelling",
    version,
    about = "Hotelling location games on a line, with line cuts and server crashes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Payoff of every server, optionally next to independent oracles.
    Payoff(PayoffArgs),
    /// Check whether a configuration is an equilibrium (exit 2 if not).
    Verify(VerifyArgs),
    /// Emit a known equilibrium as a configuration file.
    Construct(ConstructArgs),
    /// Run best-response dynamics and print the trace as JSON lines.
    Dynamics(DynamicsArgs),
    /// Line-failure equilibrium positions and payoffs over a range of r.
    Sweep(SweepArgs),
    /// Number of equilibria per game variant for n = 1..6.
    Table1(Table1Args),
    /// Scenario tables for deviations from the four-server line-failure equilibrium.
    #[command(name = "appendix-a", alias = "appendixA")]
    AppendixA(AppendixArgs),
    /// Exhaustive grid search for player-failure equilibria.
    Probe(ProbeArgs),
}

impl Command {
    pub fn out(&self) -> Option<&Path> {
        match self {
            Command::Payoff(a) => a.output.out.as_deref(),
            Command::Verify(a) => a.output.out.as_deref(),
            Command::Construct(a) => a.output.out.as_deref(),
            Command::Dynamics(a) => a.out.as_deref(),
            Command::Sweep(a) => a.out.as_deref(),
            Command::Table1(a) => a.out.as_deref(),
            Command::AppendixA(a) => a.out.as_deref(),
            Command::Probe(a) => a.output.out.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Classic,
    #[value(alias = "line-failure")]
    Lf,
    #[value(alias = "player-failure")]
    Pf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    RoundRobin,
    LargestGain,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::Classic)]
    pub variant: VariantArg,
    /// Failure probability (lf and pf only).
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Server positions.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, conflicts_with = "config")]
    pub positions: Vec<f64>,
    /// Segment endpoints; defaults to 0 1.
    #[arg(
        long,
        num_args = 2,
        value_names = ["A", "B"],
        allow_negative_numbers = true,
        conflicts_with = "config"
    )]
    pub segment: Option<Vec<f64>>,
    /// JSON file of the form {"segment": [a, b], "positions": [...]}.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PayoffArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Add the exact oracle: quadrature (lf) or subset enumeration (pf).
    #[arg(long)]
    pub oracles: bool,
    /// Add a Monte Carlo estimate with this many samples (needs --seed).
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Largest gain still counted as no improvement.
    #[arg(long, default_value_t = 1e-9)]
    pub delta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub n: usize,
    /// Hinterland length for the n >= 6 families.
    #[arg(long)]
    pub family_param: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub segment: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Start from n uniformly random positions (needs --seed).
    #[arg(long, conflicts_with_all = ["positions", "config"])]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = ScheduleArg::RoundRobin)]
    pub schedule: ScheduleArg,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Grid used to detect revisited configurations.
    #[arg(long, default_value_t = 1e-6)]
    pub quantum: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub delta: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub r_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub r_step: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Grid resolution of the exhaustive scans.
    #[arg(long, default_value_t = crate::table1::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AppendixArgs {
    #[arg(long)]
    pub r: f64,
    /// A single deviation point; without it both regions are swept.
    #[arg(long)]
    pub y: Option<f64>,
    /// Sweep points per region.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 50)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
