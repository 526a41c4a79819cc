use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Preset;

#[derive(Debug, Parser)]
#[command(
    name = "fdbia",
    version,
    about = "Sum DoF, alignment schemes and Monte Carlo sum rates for full-duplex cells with reconfigurable-antenna base stations"
)]
pub struct Cli {
    /// Print structured JSON on stdout instead of text or CSV.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form sum DoF for one network or the symmetric table.
    Dof(DofArgs),
    /// Test a (DL, UL) DoF pair against the no-CSIT converse region.
    Region(RegionArgs),
    /// Build one scheme on a seeded channel draw and report its diagnostics.
    SchemeCheck(SchemeCheckArgs),
    /// Run the alignment, recovery and rank suites.
    Verify(VerifyArgs),
    /// Single-cell mean sum rate against SNR.
    RateSweep(RateSweepArgs),
    /// Seven-cell mean sum rate against users per cell.
    Multicell(MulticellArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct NetworkArgs {
    /// Number of DL users.
    #[arg(long)]
    pub kd: Option<usize>,
    /// Number of UL users.
    #[arg(long)]
    pub ku: Option<usize>,
    /// Transmit preset modes at the BS.
    #[arg(long)]
    pub md: Option<usize>,
    /// Receive preset modes at the BS.
    #[arg(long)]
    pub mu: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML or JSON config file, or a CSV written by this tool.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// CSV output path; the CSV goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DofArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Tabulate K = M for these values, e.g. 1:1:8 or 1,2,4.
    #[arg(long)]
    pub symmetric: Option<String>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// DL and UL sum DoF as `d_d,d_u`; fractions (1/2) and decimals allowed.
    #[arg(long)]
    pub point: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    NoCsit,
    PartialCsit,
}

#[derive(Debug, Args)]
pub struct SchemeCheckArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, value_enum, default_value = "partial-csit")]
    pub model: ModelArg,
    /// Partial-CSIT symbol allocation `n_d,n_u`; the best one by default.
    #[arg(long)]
    pub alloc: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest L_d and L_u covered by the recovery and rank suites.
    #[arg(long, default_value_t = 4)]
    pub max_l: usize,
    /// Largest block length covered by the alignment suite.
    #[arg(long, default_value_t = 36)]
    pub max_block: usize,
    /// Channel draws per configuration.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RateSweepArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// SNR points in dB: `a,b,c` or `start:step:stop`.
    #[arg(long)]
    pub snr_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Residual self-interference power relative to the noise (linear).
    #[arg(long)]
    pub residual_si: Option<f64>,
    /// Comma-separated subset of fd-partial, fd-no-csit, hd-partial, hd-no-csit.
    #[arg(long)]
    pub systems: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchedulerArg {
    RoundRobin,
    MaxSnr,
    Both,
}

#[derive(Debug, Args)]
pub struct MulticellArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Users per type per cell: `a,b,c` or `start:step:stop`.
    #[arg(long = "j-grid", alias = "J-grid")]
    pub j_grid: Option<String>,
    #[arg(long, value_enum)]
    pub scheduler: Option<SchedulerArg>,
    /// Path-loss exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Power at unit distance over the noise, in dB.
    #[arg(long)]
    pub pref_db: Option<f64>,
    /// Number of drops.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub residual_si: Option<f64>,
    #[arg(long)]
    pub systems: Option<String>,
}
