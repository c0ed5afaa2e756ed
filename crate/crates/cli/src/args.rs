use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::values::{parse_grid, StepSpec};

#[derive(Debug, Parser)]
#[command(name = "eo", version, about = "Extremal optimization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random instance to a file
    Generate(GenerateArgs),
    /// Optimize one instance with EO, tau-EO or simulated annealing
    Run(RunArgs),
    /// Mean best cost over a grid of tau values
    SweepTau(SweepArgs),
    /// EO against simulated annealing at equal running time
    Compare(CompareArgs),
    /// Bak-Sneppen and jamming model dynamics
    #[command(subcommand)]
    Models(ModelsCommand),
    /// Fits and ground-state statistics
    #[command(subcommand)]
    Analysis(AnalysisCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Gbp,
    Color,
    Spinglass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Greedy rank selection (always the worst variable)
    Eo,
    /// Power-law rank selection with exponent --tau
    EoTau,
    /// Simulated annealing
    Sa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Erdős–Rényi random graph
    Er,
    /// Random geometric graph on the unit torus
    Geo,
    /// ±J spin glass on a periodic cubic lattice
    Pmj,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random choice
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long = "gen", value_enum)]
    pub generator: GenKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Mean connectivity
    #[arg(long)]
    pub c: Option<f64>,
    /// File name inside --out
    #[arg(long, default_value = "instance.txt")]
    pub name: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemKind,
    #[arg(long, value_enum, default_value = "eo-tau")]
    pub algo: Algo,
    /// Rank exponent, required by eo-tau
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of colors
    #[arg(long = "K", default_value_t = 3)]
    pub colors: u8,
    /// Updates per restart; `200n` means 200 times the instance size
    #[arg(long, default_value = "100n")]
    pub steps: StepSpec,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long = "gen", value_enum, conflicts_with = "instance")]
    pub generator: Option<GenKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Instance file instead of a generated one
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long = "gen", value_enum)]
    pub generator: GenKind,
    /// Sizes, comma separated
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Lattice sides, comma separated
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Vec<usize>,
    /// Instances per size
    #[arg(long, default_value_t = 1)]
    pub instances: usize,
    /// Runs per instance
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// `lo:hi:step` or a comma-separated list
    #[arg(long, value_parser = parse_grid)]
    pub tau_grid: GridArg,
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value = "gbp")]
    pub problem: ProblemKind,
    #[arg(long = "K", default_value_t = 3)]
    pub colors: u8,
    /// Rank exponent of the EO side
    #[arg(long, default_value_t = 1.4)]
    pub tau: f64,
    /// EO updates per run
    #[arg(long, default_value = "1000n")]
    pub steps: StepSpec,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Connectivities: `lo:hi:step` or a comma-separated list
    #[arg(long, value_parser = parse_grid)]
    pub c: GridArg,
    /// Fixed SA trial budget instead of timing both algorithms
    #[arg(long)]
    pub sa_trials: Option<StepSpec>,
    /// Run EO against itself instead of SA
    #[arg(long)]
    pub self_check: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridArg(pub Vec<f64>);

#[derive(Debug, Subcommand)]
pub enum ModelsCommand {
    /// Bak-Sneppen ring: fitness histogram and threshold
    Bs(BsArgs),
    /// Jamming model: tau sweep and trajectories
    Jam(JamArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub steps: StepSpec,
    /// Updates discarded before measuring; defaults to a tenth of --steps
    #[arg(long)]
    pub burn_in: Option<StepSpec>,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    /// Deep variables escape only while enough variables sit at -1
    Catalyzed,
    /// Fixed transition probabilities
    Barrier,
}

#[derive(Debug, Clone, Args)]
pub struct JamArgs {
    #[arg(long, value_parser = parse_grid)]
    pub tau_grid: GridArg,
    /// Sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Updates per variable
    #[arg(long, default_value_t = 10)]
    pub sweeps: u64,
    #[arg(long, value_enum, default_value = "catalyzed")]
    pub kernel: KernelKind,
    /// Escape rate factor of the catalyzed kernel
    #[arg(long, default_value_t = 4.0)]
    pub catalysis: f64,
    /// Also write the trajectory at this tau (first size only)
    #[arg(long)]
    pub trajectory_tau: Option<f64>,
    /// Simulate a finite system instead of mean-field flow for the trajectory
    #[arg(long)]
    pub stochastic: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum AnalysisCommand {
    /// Fit a power-law decay to averaged best-cost traces
    Convergence(ConvergenceArgs),
    /// Finite-size scaling collapse of `n,c,mean_cost[,stderr]` data
    Collapse(CollapseArgs),
    /// Collect optimal configurations and their backbone
    GroundStates(GroundStateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    /// Trace CSV files
    #[arg(required = true)]
    pub traces: Vec<PathBuf>,
    /// First step of the fit window; use the instance size to skip the initial quench
    #[arg(long, default_value_t = 1)]
    pub from: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CollapseArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct GroundStateArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemKind,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long = "K", default_value_t = 3)]
    pub colors: u8,
    #[arg(long, default_value_t = 1.4)]
    pub tau: f64,
    #[arg(long, default_value = "100n")]
    pub steps: StepSpec,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Also enumerate exhaustively and report the exact optimum
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub common: Common,
}
