use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use degwave::config::{parse_angle, parse_bessel_arg, parse_initial, RawConfig, RunConfig};
use degwave::{cmd_resolvent, cmd_simulate, cmd_spectrum, cmd_transfer, Report};
use degwave_core::semigroup::InitialKind;
use degwave_core::transfer::BesselArg;

/// Numerical laboratory for the boundary-damped degenerate wave equation
/// w_tt = (x^α w_x)_x on (0, 1), α ∈ [1, 2).
///
/// Exit status: 0 when every quality flag is clean, 2 when the run completed
/// with flags, 1 on errors.
#[derive(Parser)]
#[command(name = "degwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continuum eigenvalues against the finite-element pencil, plus the damped spectrum.
    Spectrum(Common),
    /// Time-stepped energy decay with the dissipation identity and a power-law fit.
    Simulate(Common),
    /// Resolvent norm along the imaginary axis and growth fits.
    Resolvent(Common),
    /// Transfer function and c_nu probe along rays and a vertical line.
    Transfer(Common),
}

#[derive(Args)]
struct Common {
    /// Degeneracy exponent, in [1, 2).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Number of mesh cells (at least 16).
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write every table as JSON records.
    #[arg(long)]
    json: bool,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time T.
    #[arg(long)]
    horizon: Option<f64>,
    /// Initial data: bump, polynomial, zero or eigenmode:N.
    #[arg(long, value_parser = parse_initial)]
    initial: Option<InitialKind>,
    /// Lower end of the λ (or |λ|) range.
    #[arg(long)]
    lambda_min: Option<f64>,
    /// Upper end of the λ (or |λ|) range.
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Base spacing of the resolvent scan grid.
    #[arg(long)]
    resolution: Option<f64>,
    /// Number of eigenvalues reported by `spectrum`.
    #[arg(long)]
    modes: Option<usize>,
    /// Abscissa γ of the vertical line Re λ = γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Ray angles, comma-separated: radians or forms like pi/6, 2pi/3.
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// Cutoff x* at which the c_nu probe is read.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Bessel argument in the closed form of H.
    #[arg(long, value_parser = parse_bessel_arg)]
    bessel_arg: Option<BesselArg>,
    /// Points per ray and on the vertical line.
    #[arg(long)]
    samples: Option<usize>,
    /// Write the assembled matrices in coordinate format.
    #[arg(long)]
    export_coo: bool,
}

impl Common {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let file = match &self.config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            alpha: self.alpha,
            grid: self.grid,
            out: self.out,
            dt: self.dt,
            horizon: self.horizon,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            resolution: self.resolution,
            gamma: self.gamma,
            theta: self.theta,
            cutoff: self.cutoff,
            bessel_arg: self.bessel_arg,
            samples: self.samples,
            modes: self.modes,
            initial: self.initial,
            json: self.json.then_some(true),
            export_coo: self.export_coo.then_some(true),
        };
        Ok(RunConfig::from_raw(file.overlay(flags))?)
    }
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let (cmd, common): (fn(&RunConfig) -> anyhow::Result<Report>, Common) = match cli.command {
        Command::Spectrum(c) => (cmd_spectrum, c),
        Command::Simulate(c) => (cmd_simulate, c),
        Command::Resolvent(c) => (cmd_resolvent, c),
        Command::Transfer(c) => (cmd_transfer, c),
    };
    cmd(&common.into_config()?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            for flag in &report.flags {
                eprintln!("flag: {flag}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
