//! The `cuspflow` command line.
//!
//! Exit status is 0 on success, 1 for invalid input, 2 for a numerical
//! failure and 64 for a usage error. Every failure writes exactly one line
//! starting with `ERROR <code>:` to stderr.

mod args;
mod commands;
mod error;
mod files;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command, Format};
pub use error::CliError;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{}", e.render());
            return 0;
        }
        Err(e) => return report(err, &CliError::Usage(clap_message(&e))),
    };
    match commands::dispatch(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => report(err, &e),
    }
}

fn report(err: &mut dyn Write, e: &CliError) -> u8 {
    let _ = writeln!(err, "ERROR {}: {}", e.code(), e);
    e.exit_code()
}

/// The leading paragraph of a clap error on one line, without `error: `.
fn clap_message(e: &clap::Error) -> String {
    let text = e.render().to_string();
    let para: Vec<&str> = text
        .lines()
        .take_while(|l| !l.trim().is_empty())
        .map(str::trim)
        .collect();
    let line = para.join(" ");
    line.strip_prefix("error: ").unwrap_or(&line).to_string()
}
