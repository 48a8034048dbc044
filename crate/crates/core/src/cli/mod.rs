//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for bad input or I/O failure, 2 when an
//! internal invariant breaks or a result is not finite. Errors are printed
//! as a single `spinscatter: error: ...` line on standard error.

pub mod args;
pub mod commands;
pub mod emit;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use args::{load_config, Cli, Command, Params};
use emit::{render, Format, Report};

/// Environment variable holding the default output format.
pub const FORMAT_ENV: &str = "SPINSCATTER_FORMAT";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// Flags each subcommand reads, besides `--format`, `--output` and `--config`.
fn accepted(cmd: &Command) -> &'static [&'static str] {
    const PROTOCOL: &[&str] = &[
        "k",
        "r",
        "xi",
        "r1",
        "r2",
        "a",
        "b",
        "a-phase",
        "b-phase",
        "half-separation",
        "axis",
        "eigenvalues",
        "mode",
        "initial",
        "protocol",
        "grid",
        "objective",
    ];
    match cmd {
        Command::Amplitudes(_) => &["k", "r", "xi"],
        Command::Filter(_) => &["k", "r", "xi", "axis"],
        Command::Kondo(_) => &["k", "r", "xi", "eigenvalues"],
        Command::Concentrate(_) => {
            &["k", "r", "xi", "a", "b", "a-phase", "b-phase", "axis", "eigenvalues", "impurity", "tree"]
        }
        Command::EntangleParticles(_) => &["k", "r", "xi", "eigenvalues", "initial", "axis", "tree"],
        Command::EntangleImpurities(_) => {
            &["k", "r", "xi", "r1", "r2", "eigenvalues", "initial", "axis", "mode", "half-separation", "tree"]
        }
        Command::Sweep(_) => PROTOCOL,
        Command::Selftest(_) => &[],
    }
}

fn resolve_format(p: &Params) -> Result<Format, CliError> {
    if let Some(f) = &p.format {
        return f.parse().map_err(|e: String| CliError::input(format!("invalid --format: {e}")));
    }
    match std::env::var(FORMAT_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            v.parse().map_err(|e: String| CliError::input(format!("invalid {FORMAT_ENV}: {e}")))
        }
        _ => Ok(Format::Table),
    }
}

fn execute(cmd: &Command, p: &Params) -> Result<Report, CliError> {
    match cmd {
        Command::Amplitudes(_) => commands::amplitudes(p),
        Command::Filter(_) => commands::filter(p),
        Command::Kondo(_) => commands::kondo(p),
        Command::Concentrate(_) => commands::concentrate(p),
        Command::EntangleParticles(_) => commands::entangle_particles(p),
        Command::EntangleImpurities(_) => commands::entangle_impurities(p),
        Command::Sweep(_) => commands::run_sweep(p),
        Command::Selftest(_) => {
            let checks = selftest::checks()?;
            let mut rep = selftest::report(&checks);
            rep.failure = checks
                .iter()
                .find(|c| !c.passed())
                .map(|c| format!("selftest check '{}' failed: {} outside [{}, {}]", c.name, c.value, c.lower, c.bound));
            Ok(rep)
        }
    }
}

struct Rendered {
    data: String,
    /// Summary lines for standard error (csv and json only).
    notes: Vec<String>,
    output: Option<std::path::PathBuf>,
    /// Reported after the data has been written.
    failure: Option<String>,
}

fn run_inner(cli: Cli) -> Result<Rendered, CliError> {
    let flags = cli.command.params().clone();
    let allowed = accepted(&cli.command);
    if let Some(bad) = flags.set_names().into_iter().find(|n| !allowed.contains(n)) {
        return Err(CliError::input(format!("--{bad} is not used by {}", cli.command.name())));
    }
    let params = match &flags.config {
        Some(path) => flags.clone().merged_with(load_config(path).map_err(CliError::Input)?),
        None => flags,
    };
    let format = resolve_format(&params)?;
    let report = execute(&cli.command, &params)?;
    if let Some(col) = report.first_non_finite() {
        return Err(CliError::Internal(format!("non-finite value in output column '{col}'")));
    }
    Ok(Rendered {
        data: render(&report, format),
        notes: if format == Format::Table { Vec::new() } else { report.notes },
        output: params.output,
        failure: report.failure,
    })
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    let text = e.render().to_string();
                    let first = text.lines().next().unwrap_or("invalid arguments");
                    let first = first.strip_prefix("error: ").unwrap_or(first);
                    eprintln!("spinscatter: error: {first}");
                    1
                }
            };
        }
    };

    match run_inner(cli) {
        Ok(Rendered { data, notes, output, failure }) => {
            let written = match &output {
                Some(path) => {
                    std::fs::write(path, data.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display()))
                }
                None => {
                    let mut out = std::io::stdout().lock();
                    out.write_all(data.as_bytes())
                        .and_then(|_| out.flush())
                        .map_err(|e| format!("cannot write output: {e}"))
                }
            };
            if let Err(msg) = written {
                eprintln!("spinscatter: error: {msg}");
                return 1;
            }
            for n in notes {
                eprintln!("{n}");
            }
            match failure {
                Some(msg) => {
                    eprintln!("spinscatter: error: {msg}");
                    2
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("spinscatter: error: {}", e.message());
            e.exit_code()
        }
    }
}
