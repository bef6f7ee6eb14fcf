//! Command-line front end for `blb-core`: argument grammar, file formats,
//! parallel sweeps and reproducible `{config, result}` output.

pub mod cli;
mod commands;
pub mod inputs;
pub mod output;
pub mod selftest;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::Parser;

pub use cli::{Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_WITNESS: i32 = 3;
pub const EXIT_EXPECTATION: i32 = 4;

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        Self { code: EXIT_FAILURE, message: e.to_string() }
    }
}

impl From<blb_core::Error> for CliError {
    fn from(e: blb_core::Error) -> Self {
        use blb_core::Error::*;
        let code = match e {
            InvalidFunction(_) | InvalidExponent { .. } | InvalidArgument(_) | LinearDependence { .. } | MomentPrecondition { .. } => EXIT_USAGE,
            Shooting(_) | Design(_) => EXIT_FAILURE,
        };
        Self { code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Thread count from `BLB_THREADS`, if set.
fn thread_setting() -> Result<Option<usize>, CliError> {
    match std::env::var("BLB_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::usage(format!("BLB_THREADS: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("BLB_THREADS = '{s}' must be a positive integer"))),
        },
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let outcome = thread_setting().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(CliError::internal)?;
        // The writer need not be Send, so results are buffered in the pool.
        pool.install(|| {
            let mut buf = Vec::new();
            let code = commands::dispatch(&cli, &mut buf)?;
            Ok((buf, code))
        })
    });
    match outcome {
        Ok((buf, code)) => match out.write_all(&buf).and_then(|_| out.flush()) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                EXIT_FAILURE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}
