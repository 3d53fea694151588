//! Command-line front end: sweep the coupler kinematics of a spherical
//! four-bar, or verify its dual derivatives against finite differences.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! assembly error, 3 verification had nothing to test.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dualkin::cli::{
    load_params, render_sweep_csv, render_sweep_table, sweep, verify, OutputFormat, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "dualkin",
    version,
    about = "Spherical four-bar coupler kinematics via second-order dual numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the input angle and print coupler position, velocity, acceleration
    Sweep(RunArgs),
    /// Compare dual derivatives against finite differences over the same grid
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Linkage parameter file (JSON)
    #[arg(long, value_name = "FILE")]
    params: PathBuf,
    /// First input angle of the grid, radians
    #[arg(long, default_value_t = 0.0)]
    theta_start: f64,
    /// End of the grid (exclusive), radians
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    theta_end: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Input angular velocity dθ/dt
    #[arg(long, default_value_t = 1.0)]
    theta_dot: f64,
    /// Input angular acceleration d²θ/dt²
    #[arg(long, default_value_t = 0.0)]
    theta_ddot: f64,
    /// Output style
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Decimal digits in rendered numbers
    #[arg(long, default_value_t = 5)]
    precision: usize,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, dualkin::Error> {
        let params = load_params(&self.params)?;
        let mut config = RunConfig::new(params);
        config.theta_start = self.theta_start;
        config.theta_end = self.theta_end;
        config.steps = self.steps;
        config.theta_dot = self.theta_dot;
        config.theta_ddot = self.theta_ddot;
        config.format = self.format;
        config.precision = self.precision;
        config.validate()?;
        Ok(config)
    }
}

fn report_skips(skipped: &[(f64, String)], total: usize) {
    for (theta, reason) in skipped {
        eprintln!("skipped theta={theta:.7}: {reason}");
    }
    if !skipped.is_empty() {
        eprintln!("skipped {} of {} grid points", skipped.len(), total);
    }
}

fn run() -> Result<u8, dualkin::Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => {
            let config = args.into_config()?;
            let result = sweep(&config)?;
            report_skips(&result.skipped, config.steps);
            let text = match config.format {
                OutputFormat::Table => render_sweep_table(&result, config.precision),
                OutputFormat::Csv => render_sweep_csv(&result, config.precision),
            };
            print!("{text}");
            Ok(0)
        }
        Command::Verify(args) => {
            let config = args.into_config()?;
            let result = verify(&config)?;
            report_skips(&result.skipped, config.steps);
            match config.format {
                OutputFormat::Table => println!("{}", result.report),
                OutputFormat::Csv => print!("{}", result.report.to_csv()),
            }
            if result.report.testable_rows() == 0 {
                eprintln!("verification had nothing to test: every grid point was skipped");
                Ok(3)
            } else if result.report.overall_pass() {
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
