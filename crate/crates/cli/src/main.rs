//! `east`: batch driver for constrained-hopping chain studies.

mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Loaded;
use crate::error::CliError;
use crate::output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "east", version, about = "Spectra, entanglement, dynamics and automata of East-type hopping chains")]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads; 1 selects the sequential reference path.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum Command {
    /// Spectrum, level statistics, density of states and ground state.
    Spectrum,
    /// Entanglement scatter and the separable-eigenstate census.
    EntanglementScan,
    /// Quench from a configured superposition.
    Quench,
    /// Domain-wall melting over a sweep of particle numbers.
    Dw,
    /// Classical gate automaton from the domain wall.
    Automaton,
    /// Connected components, frozen labels and leg structure.
    Fragmentation,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::EntanglementScan => "entanglement-scan",
            Command::Quench => "quench",
            Command::Dw => "dw",
            Command::Automaton => "automaton",
            Command::Fragmentation => "fragmentation",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let loaded = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Loaded::parse(&text)?
        }
        None => Loaded::defaults(),
    };
    let mut out = OutDir::create(&cli.out)?;
    let name = cli.command.name();
    let result = match cli.command {
        Command::Spectrum => commands::spectrum(&loaded, &mut out)?,
        Command::EntanglementScan => commands::entanglement_scan(&loaded, &mut out)?,
        Command::Quench => commands::quench(&loaded, &mut out)?,
        Command::Dw => commands::dw(&loaded, &mut out)?,
        Command::Automaton => commands::automaton(&loaded, &mut out)?,
        Command::Fragmentation => commands::fragmentation(&loaded, &mut out)?,
    };
    let problem = match cli.command {
        Command::Automaton => None,
        _ => loaded.problem().ok(),
    };
    out.write("config.toml", |w| {
        use std::io::Write;
        w.write_all(loaded.source().as_bytes())?;
        Ok(())
    })?;
    let summary = commands::summary(name, problem.as_ref(), result);
    out.json("summary.json", &summary, &["command", "model", "result"])?;
    eprintln!("{name}: {} files in {}", out.written().len(), cli.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
