//! Command-line driver for `mipd-core`.
//!
//! Exit status: 0 success, 1 usage error, 2 numeric failure, 3 I/O error.

pub mod args;
pub mod commands;
pub mod csv;
pub mod error;
pub mod manifest;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use error::CliError;

/// Parses `argv`, runs the command and returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = commands::configure_threads(std::env::var("MIPD_THREADS").ok())
        .and_then(|()| commands::execute(&cli.command, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "mipd: {e}");
            e.exit_code()
        }
    }
}
