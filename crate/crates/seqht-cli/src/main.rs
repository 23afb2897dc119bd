mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "seqht", version, about = "Sequency truncation of a digitized scalar field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walsh coefficients of φ^p per register size, plus the continuum limit.
    Decompose(CommonArgs),
    /// Normalized coefficients against their sequency bounds.
    Bounds(CommonArgs),
    /// Spectra of the truncated, full and free Hamiltonians.
    Eigen(CommonArgs),
    /// One adiabatic preparation run.
    Asp(CommonArgs),
    /// Fidelity over a grid of step counts and time steps.
    Scan(CommonArgs),
    /// Linear stabilizer magic of Gaussian states.
    Magic(CommonArgs),
    /// CNOT count and depth of the preparation circuit.
    Resources(CommonArgs),
}

impl Command {
    fn split(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Decompose(a) => ("decompose", a),
            Command::Bounds(a) => ("bounds", a),
            Command::Eigen(a) => ("eigen", a),
            Command::Asp(a) => ("asp", a),
            Command::Scan(a) => ("scan", a),
            Command::Magic(a) => ("magic", a),
            Command::Resources(a) => ("resources", a),
        }
    }
}

fn run(cfg: &RunConfig) -> anyhow::Result<()> {
    let report = match cfg.command {
        "decompose" => commands::decompose(cfg)?,
        "bounds" => commands::bounds(cfg)?,
        "eigen" => commands::eigen(cfg)?,
        "asp" => commands::asp(cfg)?,
        "scan" => commands::scan(cfg)?,
        "magic" => commands::magic(cfg)?,
        "resources" => commands::resources(cfg)?,
        other => unreachable!("unknown command {other}"),
    };
    let bytes = report::render(cfg, &report)?;
    match &cfg.output_path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display()))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, args) = cli.command.split();
    let cfg = match RunConfig::resolve(name, args) {
        Ok(c) => c,
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
