use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "slm",
    version,
    about = "Simulate seasonal long-memory processes and estimate (s0, alpha) from filter coefficients"
)]
pub struct Cli {
    /// Increase log output (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Worker threads [default: available parallelism]
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print filter constants c2, c3 and the effective band limit as JSON
    Constants(ConstantsArgs),
    /// Tabulate the spectral density and, optionally, the covariance function
    Spectrum(SpectrumArgs),
    /// Simulate a Gegenbauer moving-average path
    Simulate(SimulateArgs),
    /// Produce a coefficient panel from a path or from the exact Gaussian law
    Transform(TransformArgs),
    /// Estimate (s0, alpha) level by level from a coefficient panel
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment and write the MSE table
    Montecarlo(MontecarloArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Filter name (shannon-father, shannon-mother, meyer-father, meyer-mother, mexican-hat)
    #[arg(long, value_name = "NAME")]
    pub filter: Option<String>,

    /// Width parameter of the Mexican hat
    #[arg(long, value_name = "F")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub filter: FilterArgs,

    /// Also write constants.json and a manifest into this directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model JSON file; flags below override its keys
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Spectral family (indicator, gegenbauer)
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,

    /// Singular frequency of the indicator family
    #[arg(long, value_name = "F")]
    pub s0: Option<f64>,

    /// Memory exponent of the indicator family
    #[arg(long, value_name = "F")]
    pub alpha: Option<f64>,

    /// Cutoff of the indicator family
    #[arg(long = "M", value_name = "F")]
    pub m: Option<f64>,

    /// Gegenbauer memory parameter
    #[arg(long, value_name = "F")]
    pub d: Option<f64>,

    /// Gegenbauer frequency parameter, s0 = arccos(u)
    #[arg(long, value_name = "F")]
    pub u: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Left end of the frequency grid
    #[arg(long, default_value_t = -std::f64::consts::PI, allow_negative_numbers = true, value_name = "F")]
    pub lambda_min: f64,

    /// Right end of the frequency grid
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true, value_name = "F")]
    pub lambda_max: f64,

    /// Number of frequency grid points
    #[arg(long, default_value_t = 201, value_name = "N")]
    pub points: usize,

    /// Largest lag of the covariance table; omit to skip it
    #[arg(long, value_name = "F")]
    pub r_max: Option<f64>,

    /// Number of lags in the covariance table
    #[arg(long, default_value_t = 51, value_name = "N")]
    pub r_points: usize,

    /// Output directory
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation JSON file
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Override the seed in the config
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Transform JSON file
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Path CSV (t,x) to transform instead of simulating one
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Override the seed in the config
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Coefficient panel CSV (j,k,a_j,b_jk,delta_jk)
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Model JSON file supplying the filter and the true parameters
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub filter: FilterArgs,

    /// Seed recorded with the panel
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    /// Experiment JSON file
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Override base_seed in the config
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
}
