use clap::{Args, Parser, Subcommand, ValueEnum};
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "teleport",
    version,
    about = "Average teleportation fidelities of Gaussian ensembles: deterministic CV versus hybrid probabilistic teleportation",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. List-valued flags take comma-separated
/// values; only `sweep` accepts more than one.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Inverse width of the squeezing prior.
    #[arg(long, global = true, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Inverse width of the displacement prior; selects the general Gaussian ensemble.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Entanglement budget in ebits.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ebits: Vec<f64>,
    /// Mean photon-number budget.
    #[arg(long, global = true, value_delimiter = ',')]
    pub energy: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub branches: Vec<usize>,
    /// VBK gain; freezes the gain when optimizing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub gain: Vec<f64>,
    /// Points per axis for figures; grid density for the optimizer.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Largest accepted integration error (figures, sweeps) or simplex tolerance (optimize).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// File of `key=value` lines giving defaults for the flags above.
    #[arg(long, global = true, env = "TELEPORT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true, env = "TELEPORT_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classical measure-and-prepare threshold.
    Benchmark {
        #[arg(value_enum)]
        kind: BenchmarkKind,
    },
    /// Single-shot fidelity for one input state.
    Fidelity(FidelityArgs),
    /// Ensemble-averaged fidelity for a fixed resource.
    Average(AverageArgs),
    /// Best VBK resource and gain under an entropy or energy budget.
    Optimize(OptimizeArgs),
    /// Data and SVG for one of the reference figures.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
    },
    /// Rectangular parameter sweep; resumable.
    Sweep(SweepArgs),
    /// Cross-check the fast paths against the Fock-space oracle.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchmarkKind {
    Squeezed,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Vbk,
    Ar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Gaussian,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Moments,
    Quadrature,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    /// Squeezing parameter `s` of the input.
    #[arg(long, default_value_t = 0.0)]
    pub squeezing: f64,
    /// Squeezing angle `φ` of the input.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub squeeze_phase: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ResourceArgs {
    /// Two-mode squeezing; alternatively fixed by `--ebits` or `--energy`.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub phi_zeta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FidelityArgs {
    #[arg(value_enum)]
    pub scheme: SchemeArg,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub resource: ResourceArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Moments)]
    pub method: MethodArg,
    /// Fock cutoff of the oracle method.
    #[arg(long, default_value_t = 80)]
    pub cutoff: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AverageArgs {
    #[arg(value_enum)]
    pub scheme: SchemeArg,
    #[command(flatten)]
    pub resource: ResourceArgs,
    /// Monte-Carlo estimate with this many prior draws instead of quadrature.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value_t = SearchArg::Gaussian)]
    pub search: SearchArg,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = SearchArg::Gaussian)]
    pub search: SearchArg,
    /// Stem of the output files.
    #[arg(long, default_value = "sweep")]
    pub name: String,
}

#[derive(Debug, Clone, Subcommand)]
pub enum OracleAction {
    Check {
        /// Random cases per scheme.
        #[arg(long, default_value_t = 10)]
        cases: usize,
    },
}
