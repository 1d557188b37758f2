//! `impact-game`: equilibria, limits, tax metrics and simulations of the
//! two-agent transient-impact liquidation game, written as CSV or JSON.
//!
//! Exit codes: 0 success, 1 parameter error, 2 numerical error or failed check.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use impact_game::GameError;

use config::{Flags, Format, Resolved};

#[derive(Debug, Parser)]
#[command(name = "impact-game", version, about = "Market impact game with exponentially decaying impact")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Equilibrium trades v, w, ξ*, η* on the grid.
    Equilibrium,
    /// Costs and tax metrics for each N in --n-list.
    Sweep,
    /// High-frequency limit curves and cost limits.
    Limits,
    /// Continuous-time equilibrium at θ = 1/4 and its first-order condition.
    Continuous,
    /// Monte Carlo estimate of the expected costs.
    Montecarlo,
    /// Tax revenue and taxation cost, for --N or each N in --n-list.
    Tax,
    /// Cross-checks solvers and identities over a grid.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::Sweep => "sweep",
            Command::Limits => "limits",
            Command::Continuous => "continuous",
            Command::Montecarlo => "montecarlo",
            Command::Tax => "tax",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Param(String),
    Numeric(String),
    Io(String),
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        if e.is_parameter_error() {
            CliError::Param(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Param(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Param(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("IMPACT_GAME_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Param(format!("IMPACT_GAME_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Numeric(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let cfg = Resolved::from_flags(&cli.flags)?;
    let (table, ok) = match cli.command {
        Command::Equilibrium => (commands::equilibrium(&cfg)?, true),
        Command::Sweep => (commands::sweep(&cfg)?, true),
        Command::Limits => (commands::limits(&cfg)?, true),
        Command::Continuous => (commands::continuous(&cfg)?, true),
        Command::Montecarlo => (commands::montecarlo(&cfg)?, true),
        Command::Tax => (commands::tax(&cfg)?, true),
        Command::Verify => commands::verify(&cfg)?,
    };
    let dt = cfg.horizon / cfg.steps as f64;
    let echo = cfg.echo();
    match &cfg.output {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            table.emit(&mut w, cfg.format, cli.command.name(), echo, dt)?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        None => table.emit(io::stdout().lock(), cfg.format, cli.command.name(), echo, dt)?,
    }
    if cfg.format == Format::Csv {
        let mut err = io::stderr().lock();
        for (k, v) in &table.summary {
            let _ = writeln!(err, "{k}={}", cell_text(v));
        }
    }
    Ok(ok)
}

fn cell_text(c: &table::Cell) -> String {
    match c {
        table::Cell::Int(v) => v.to_string(),
        table::Cell::Float(v) => table::format_float(*v),
        table::Cell::Bool(v) => v.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: verification failed; see rows with pass=false");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
