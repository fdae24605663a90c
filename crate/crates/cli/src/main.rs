//! `hq`: run heralding circuits, CGLMP sweeps and optimizations, and write
//! the results as JSON or CSV.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hq", version, about = "Heralded qutrit circuits and CGLMP tests")]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random choice (optimizer starts, random inputs).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Herald a two-qutrit state from two Bell pairs.
    Herald(HeraldArgs),
    /// Amplitudes of the heralded state along the unbalanced family.
    Fig2(Fig2Args),
    /// CGLMP value over the two-parameter measurement family.
    Fig4(Fig4Args),
    /// Truncated PDC source and its qutrit component.
    Pdc(PdcArgs),
    /// Grow a qudit state by repeated heralding.
    Nest(NestArgs),
    /// Teleport a qutrit through the unbalanced resource.
    Teleport(TeleportArgs),
    /// Heralded Bell pair from four single photons.
    Hbpg,
    /// Maximize the CGLMP value by multistart simplex search.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
pub struct HeraldArgs {
    /// Use an unbalanced Bell pair in modes A, B.
    #[arg(long)]
    unbalanced: bool,
    /// Amplitude angle of the unbalanced pair (radians).
    #[arg(long, requires = "unbalanced", default_value_t = std::f64::consts::FRAC_PI_4, allow_negative_numbers = true)]
    theta: f64,
    /// Relative phase of the unbalanced pair (radians).
    #[arg(long, requires = "unbalanced", default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    #[arg(long, default_value_t = 91)]
    steps: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta_min: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    theta_max: f64,
}

#[derive(Debug, Args)]
pub struct Fig4Args {
    /// Grid points per axis.
    #[arg(long, default_value_t = 400)]
    steps: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    y_max: f64,
}

#[derive(Debug, Args)]
pub struct PdcArgs {
    /// Effective interaction time.
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 3)]
    d_max: u32,
}

#[derive(Debug, Args)]
pub struct NestArgs {
    /// Target dimension, 3 to 6.
    #[arg(long)]
    d: u32,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// `0`, `1`, `2`, `plus` (equal superposition) or `random` (uses --seed).
    #[arg(long, default_value = "0")]
    input: String,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 50)]
    multistart: usize,
    /// Optimize over arbitrary U(3) measurements instead of the optical family.
    #[arg(long)]
    general: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
