//! `markcorr` command-line front end.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Opts, Settings};

#[derive(Parser, Debug)]
#[command(name = "markcorr", version, about = "Inhomogeneous mark correlation functions for marked point patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate marked patterns from a scenario preset
    Simulate(Opts),
    /// Estimate mark correlation or mark variogram curves
    Markcorr(Opts),
    /// Random-labelling global rank envelope test
    Envelope(Opts),
    /// Rejection rates of both flavors under a scenario and under independent marks
    PowerStudy(Opts),
    /// Intensity surface on a grid
    Intensity(Opts),
    /// Kernel-smoothed local mark mean and variance on a grid
    Marksurface(Opts),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    commands::configure_threads()?;
    let (opts, action): (&Opts, fn(&Settings) -> anyhow::Result<()>) = match &cli.command {
        Command::Simulate(o) => (o, commands::simulate),
        Command::Markcorr(o) => (o, commands::markcorr),
        Command::Envelope(o) => (o, commands::envelope),
        Command::PowerStudy(o) => (o, commands::power_study),
        Command::Intensity(o) => (o, commands::intensity),
        Command::Marksurface(o) => (o, commands::marksurface),
    };
    action(&Settings::resolve(opts)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
