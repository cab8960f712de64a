//! Batch front end for `nonlocal-core`: parameter scans, threshold and gap
//! reports, local-polytope checks of table files and Monte Carlo sampling.
//!
//! Exit codes: 0 success or local verdict, 1 usage or parse error, 2 I/O
//! error, 3 nonlocal verdict.

pub mod commands;
pub mod error;
pub mod format;
pub mod sampling;
pub mod table_io;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{execute, Outcome, RunConfig};
pub use error::{CliError, Result};

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    let outcome = match execute(&config) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    for n in &outcome.notices {
        let _ = writeln!(stderr, "notice: {n}");
    }
    let written = match &config.out {
        Some(path) => std::fs::write(path, &outcome.output)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
        None => stdout
            .write_all(outcome.output.as_bytes())
            .map_err(|e| CliError::io("writing stdout", e)),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    outcome.exit_code
}
