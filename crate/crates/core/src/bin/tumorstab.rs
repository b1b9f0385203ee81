use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tumorstab::harness::{init_workers, load_config, run_command, Command};
use tumorstab::Error;

#[derive(Parser)]
#[command(name = "tumorstab", version, about = "Linear stability of a radially symmetric tumor")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stationary radius and profiles.
    Stationary(Common),
    /// Zeros of the dispersion function for the configured modes.
    Spectrum(Common),
    /// Bifurcation values and the stability threshold.
    Bifurcation(Common),
    /// Time evolution of single modes with decay-rate fits.
    Evolve(Common),
    /// Center shift removing the translation mode.
    Recenter(Common),
    /// Built-in consistency checks.
    Verify(Common),
}

#[derive(clap::Args)]
struct Common {
    /// Configuration file (INI-style `key = value` with `[section]`s).
    #[arg(long)]
    config: PathBuf,
    /// Override a key, e.g. `--set params.beta=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (command, common) = match Cli::parse().command {
        Cmd::Stationary(c) => (Command::Stationary, c),
        Cmd::Spectrum(c) => (Command::Spectrum, c),
        Cmd::Bifurcation(c) => (Command::Bifurcation, c),
        Cmd::Evolve(c) => (Command::Evolve, c),
        Cmd::Recenter(c) => (Command::Recenter, c),
        Cmd::Verify(c) => (Command::Verify, c),
    };
    match run(command, &common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{}: some checks failed", command.name());
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}

fn run(command: Command, common: &Common) -> Result<bool, Error> {
    init_workers()?;
    let config = load_config(&common.config, &common.set, &common.out)?;
    let record = run_command(command, config)?;
    println!("{}: results in {}", command.name(), common.out.display());
    Ok(record.succeeded())
}
