use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wgm_rotor_cli::{execute, Command, Options};

/// Whispering-gallery modes and the precession they drive in a rotating sphere.
#[derive(Debug, Parser)]
#[command(name = "wgm-rotor", version)]
struct Cli {
    #[command(subcommand)]
    command: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Find resonances in the wavelength window and write the mode table.
    Modes(Common),
    /// Compute the coupling constant of the highest-Q mode in the window.
    Lambda(Common),
    /// Integrate the coupled precession and write the trajectory.
    Simulate(Common),
    /// Print the precession-rate and spin-threshold estimates.
    Estimate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output.directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Show rates as inverse lengths and inertia in units of hbar/c.
    #[arg(long)]
    natural_units: bool,
    /// Report search and quadrature diagnostics on stderr.
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Verb::Modes(c) => (Command::Modes, c),
        Verb::Lambda(c) => (Command::Lambda, c),
        Verb::Simulate(c) => (Command::Simulate, c),
        Verb::Estimate(c) => (Command::Estimate, c),
    };
    let opts = Options {
        natural_units: common.natural_units,
        verbose: common.verbose,
    };
    let outcome = execute(command, &common.config, common.out.as_deref(), opts);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
