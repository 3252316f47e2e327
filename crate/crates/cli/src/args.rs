use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use varqual_core::{InterpolationMode, MetricKind, Sidedness, SidednessConfig, SimulationMode, SourceDistribution};

#[derive(Debug, Parser)]
#[command(name = "varqual", version, about = "Audit A/B-test variance estimates with A/A t-statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute FPR, average t² and excess kurtosis reports for a t-statistic file
    Audit(AuditArgs),
    /// Run a power sweep and write power, sample-complexity and efficiency tables
    Sweep(SweepArgs),
    /// Turn a sweep directory into per-theta plot series
    Plotdata(PlotdataArgs),
    /// Generate a t-statistic file of simulated A/A tests
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Fast,
}

impl From<ModeArg> for SimulationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => SimulationMode::FullSample,
            ModeArg::Fast => SimulationMode::FastPath,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SidednessArg {
    Two,
    Greater,
}

impl From<SidednessArg> for Sidedness {
    fn from(s: SidednessArg) -> Self {
        match s {
            SidednessArg::Two => Sidedness::TwoSided,
            SidednessArg::Greater => Sidedness::OneSidedGreater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    FirstCrossing,
    Isotonic,
}

impl From<InterpArg> for InterpolationMode {
    fn from(i: InterpArg) -> Self {
        match i {
            InterpArg::FirstCrossing => InterpolationMode::FirstCrossing,
            InterpArg::Isotonic => InterpolationMode::Isotonic,
        }
    }
}

/// `uniform:LO,HI` or `normal:MEAN,SD`.
pub fn parse_source(s: &str) -> Result<SourceDistribution, String> {
    let (kind, params) = s.split_once(':').ok_or("expected uniform:LO,HI or normal:MEAN,SD")?;
    let (a, b) = params.split_once(',').ok_or("expected two comma-separated parameters")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    let source = match kind.trim().to_ascii_lowercase().as_str() {
        "uniform" => SourceDistribution::Uniform { lo: a, hi: b },
        "normal" => SourceDistribution::Normal { mean: a, sd: b },
        other => return Err(format!("unknown source kind {other:?}")),
    };
    source.validate().map_err(|e| e.to_string())?;
    Ok(source)
}

fn parse_metric(s: &str) -> Result<MetricKind, String> {
    s.parse().map_err(|e: varqual_core::Error| e.to_string())
}

/// Metric test settings shared by `audit` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// Significance level of the metric z-tests [default: 0.1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Confidence level of the audited intervals; sets the FPR threshold [default: 0.9]
    #[arg(long)]
    pub ci_level: Option<f64>,
    /// Sidedness of every metric test [default: two]
    #[arg(long, value_enum)]
    pub sidedness: Option<SidednessArg>,
    /// Override the sidedness of the FPR test
    #[arg(long, value_enum)]
    pub sidedness_fpr: Option<SidednessArg>,
    /// Override the sidedness of the average t² test
    #[arg(long, value_enum)]
    pub sidedness_avg_t2: Option<SidednessArg>,
    /// Override the sidedness of the kurtosis test
    #[arg(long, value_enum)]
    pub sidedness_kurtosis: Option<SidednessArg>,
}

impl TestArgs {
    pub fn apply_sidedness(&self, mut base: SidednessConfig) -> SidednessConfig {
        if let Some(s) = self.sidedness {
            base = SidednessConfig::uniform(s.into());
        }
        if let Some(s) = self.sidedness_fpr {
            base.fpr = s.into();
        }
        if let Some(s) = self.sidedness_avg_t2 {
            base.avg_t2 = s.into();
        }
        if let Some(s) = self.sidedness_kurtosis {
            base.kurtosis = s.into();
        }
        base
    }
}

/// Simulation settings shared by `sweep` and `simulate`.
#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Root seed of all random streams
    #[arg(long)]
    pub seed: Option<u64>,
    /// full simulates every sample; fast draws t directly [default: full]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Shorthand for --mode fast
    #[arg(long, conflicts_with = "mode")]
    pub fast: bool,
    /// Samples per group, S [default: 1000]
    #[arg(long)]
    pub group_size: Option<usize>,
    /// Sample distribution, uniform:LO,HI or normal:MEAN,SD [default: uniform:5,6]
    #[arg(long, value_parser = parse_source)]
    pub source: Option<SourceDistribution>,
}

impl SimArgs {
    pub fn mode(&self) -> Option<SimulationMode> {
        if self.fast {
            Some(SimulationMode::FastPath)
        } else {
            self.mode.map(Into::into)
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// t-statistic CSV with header experiment_id,t
    pub input: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
    /// Also write audit.json into this directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the report as JSON instead of a table
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Sweep spec or manifest.json from an earlier run; flags override its fields
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub test: TestArgs,
    /// Noise levels theta [default: 0.1,0.2,0.3,0.4]
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub thetas: Option<Vec<f64>>,
    /// Explicit grid of test counts n; overrides --n-min/--n-max/--n-count
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub n_grid: Option<Vec<usize>>,
    /// Smallest n of a log-spaced grid [default: 100]
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Largest n of a log-spaced grid [default: 10000]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Points in a log-spaced grid [default: 30]
    #[arg(long)]
    pub n_count: Option<usize>,
    /// Trials per grid cell [default: 500]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Metrics to evaluate [default: FPR,AVG_T2,KURTOSIS]
    #[arg(long, value_delimiter = ',', num_args = 1.., value_parser = parse_metric)]
    pub metrics: Option<Vec<MetricKind>>,
    /// Power-curve inversion [default: first-crossing]
    #[arg(long, value_enum)]
    pub interp: Option<InterpArg>,
    /// Target powers for sample complexity and efficiency [default: 0.5,0.6,0.7,0.8,0.9]
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub target_powers: Option<Vec<f64>>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long, default_value = "sweep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PlotdataArgs {
    /// Directory written by `varqual sweep`
    pub sweep_dir: PathBuf,
    /// Output directory [default: SWEEP_DIR/plots]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Noise level theta
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Number of A/A tests
    #[arg(long)]
    pub n: usize,
    /// Recorded in the manifest [default: 0.1]
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Output file name inside --out
    #[arg(long, default_value = "tstats.csv")]
    pub name: String,
}
