//! `rpm` command-line front end.
//!
//! Every command writes one report: JSON with `inputs`, `results` and `meta`
//! members, CSV rows, or (for `hankel-poly`) plain text. Exit codes are 0 on
//! success, 2 when a computation does not converge and 3 for invalid input.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use rpm_core::RpmError;

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use config::{Flags, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Invalid(String),
    NoConvergence(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 3,
            CliError::NoConvergence(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::NoConvergence(m) => write!(f, "no convergence: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<RpmError> for CliError {
    fn from(e: RpmError) -> Self {
        use RpmError::*;
        let message = e.to_string();
        match e {
            UnknownModel(_) | MissingParameter { .. } | InvalidParameter(_) | OrderTooLow { .. }
            | PrecisionTooLow(_) | UnboundSymbol(_) | NonlinearParameter(_) | TooManySymbols | InvalidHankel(_)
            | EmptyObservable | BeyondPole { .. } | Parse(_) => CliError::Invalid(message),
            _ => CliError::NoConvergence(message),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "rpm", version, about = "Riccati-Pade eigenvalues, bounds and eigenfunctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Track a root of H_D^d from dmin to dmax and report the last one
    Solve(Flags),
    /// Lower (d = 0) and upper (d = 1) bounds for every D
    Bounds(Flags),
    /// Every root of a tracked sequence
    Sequence(Flags),
    /// Exact Hankel determinant as a polynomial in E
    HankelPoly(Flags),
    /// Expectation value of an even polynomial observable
    Expect(Flags),
    /// Approximate eigenfunction and its Schrodinger residual on a grid
    Wavefunction(Flags),
    /// Exponential convergence-rate fit of a sequence
    Rate(Flags),
    /// Independent finite-difference eigenvalues
    Oracle(Flags),
    /// Reproduce a table (spurious, dw-e0e1)
    Table(Flags),
    /// CSV data for a figure (anal, logUBLB_0, sequences, exval, DWH20, DWH21, DWLOG)
    FigureData(Flags),
}

impl Command {
    fn split(self) -> (&'static str, Flags) {
        match self {
            Command::Solve(f) => ("solve", f),
            Command::Bounds(f) => ("bounds", f),
            Command::Sequence(f) => ("sequence", f),
            Command::HankelPoly(f) => ("hankel-poly", f),
            Command::Expect(f) => ("expect", f),
            Command::Wavefunction(f) => ("wavefunction", f),
            Command::Rate(f) => ("rate", f),
            Command::Oracle(f) => ("oracle", f),
            Command::Table(f) => ("table", f),
            Command::FigureData(f) => ("figure-data", f),
        }
    }
}

fn default_format(command: &str) -> Format {
    match command {
        "hankel-poly" => Format::Text,
        "wavefunction" | "figure-data" => Format::Csv,
        _ => Format::Json,
    }
}

/// Parse `args` (program name first), execute, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let (command, flags) = cli.command.split();
    match execute(command, flags, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "rpm {command}: {e}");
            e.exit_code()
        }
    }
}

fn precision_cap() -> Result<u32, CliError> {
    match std::env::var("RPM_PRECISION_CAP") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&c| c >= rpm_core::number::MIN_DIGITS)
            .ok_or_else(|| CliError::Invalid(format!("RPM_PRECISION_CAP must be an integer >= 20, got {v:?}"))),
        Err(_) => Ok(rpm_core::solver::DEFAULT_PRECISION_CAP),
    }
}

fn execute(command: &str, flags: Flags, stdout: &mut dyn Write) -> Result<(), CliError> {
    let flags = flags.resolve()?;
    let ctx = commands::Context::new(flags.clone(), precision_cap()?)?;
    let report = match command {
        "solve" => commands::solve(&ctx)?,
        "bounds" => commands::bounds(&ctx)?,
        "sequence" => commands::sequence(&ctx)?,
        "hankel-poly" => commands::hankel_poly(&ctx)?,
        "expect" => commands::expect(&ctx)?,
        "wavefunction" => commands::wavefunction(&ctx)?,
        "rate" => commands::rate(&ctx)?,
        "oracle" => commands::oracle(&ctx)?,
        "table" => presets::table(&ctx)?,
        "figure-data" => presets::figure_data(&ctx)?,
        other => unreachable!("unhandled command {other}"),
    };
    let format = flags.format.unwrap_or_else(|| default_format(command));
    match &flags.out {
        Some(path) => {
            let mut buf = Vec::new();
            output::emit(&report, &flags, command, format, &mut buf)?;
            std::fs::write(path, buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => output::emit(&report, &flags, command, format, stdout),
    }
}

/// Map `f` over `items` on scoped threads, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|item| s.spawn(move || f(item))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}
