//! Command-line front end: JSON configuration in, deterministic CSV out.
//!
//! ```text
//! blindspot <grid|spots|decohere|invert|check> <config.json> [--out FILE] [--threads N]
//! ```
//!
//! Exit status is 0 on success, 2 when the configuration is malformed or
//! fails validation, and 3 when a numerical step fails (window too small,
//! no convergence, a failed invariant in `check`). Diagnostics go to
//! standard error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;

mod commands;
pub mod config;
mod csv;

pub use commands::{cmd_check, cmd_decohere, cmd_grid, cmd_invert, cmd_spots, CheckOutcome};
pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "blindspot", version, about = "Chord functions, blind spots and their decoherence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample the chord, Wigner or correlation field on a grid.
    Grid(Common),
    /// Locate and refine blind spots.
    Spots(Common),
    /// Line scans of the decohering correlation with lifting/positivity summary.
    Decohere(Common),
    /// Recover centers from two indexed blind spots.
    Invert(Common),
    /// Run the invariant suite on the configured state.
    Check(Common),
}

#[derive(Debug, Clone, PartialEq, Eq, clap::Args)]
pub struct Common {
    #[arg(value_name = "CONFIG")]
    pub config: PathBuf,
    /// Write CSV here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel evaluation.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

impl Command {
    pub fn common(&self) -> &Common {
        let (Command::Grid(c) | Command::Spots(c) | Command::Decohere(c) | Command::Invert(c) | Command::Check(c)) = self;
        c
    }
}

/// Runs one command and returns the CSV text and the exit status.
pub fn execute(command: &Command) -> (Vec<u8>, i32) {
    let c = command.common();
    let text = match std::fs::read_to_string(&c.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", c.config.display());
            return (Vec::new(), EXIT_CONFIG);
        }
    };
    let cfg = match RunConfig::from_json(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return (Vec::new(), EXIT_CONFIG);
        }
    };
    let run = || -> crate::Result<(Vec<u8>, i32)> {
        let mut buf = Vec::new();
        let code = match command {
            Command::Grid(_) => cmd_grid(&cfg, &mut buf).map(|_| EXIT_OK),
            Command::Spots(_) => cmd_spots(&cfg, &mut buf).map(|_| EXIT_OK),
            Command::Decohere(_) => cmd_decohere(&cfg, &mut buf).map(|_| EXIT_OK),
            Command::Invert(_) => cmd_invert(&cfg, &mut buf).map(|_| EXIT_OK),
            Command::Check(_) => cmd_check(&cfg, &mut buf).map(|o| if o.passed() { EXIT_OK } else { EXIT_NUMERIC }),
        }?;
        Ok((buf, code))
    };
    let result = match c.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::InvalidInput(format!("thread pool: {e}"))),
        },
        None => run(),
    };
    match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            (Vec::new(), exit_code(&e))
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (csv, code) = execute(&cli.command);
    let written = match &cli.command.common().out {
        Some(path) => std::fs::write(path, &csv),
        None => std::io::stdout().lock().write_all(&csv),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_CONFIG;
    }
    code
}
