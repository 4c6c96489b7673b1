//! The `morphtag` command line: batch tagging, rule checking and the
//! interactive-resolution service.

pub mod commands;
pub mod error;
pub mod server;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use morphtag_core::Execution;

use commands::{Resources, TagArgs};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "morphtag", version, about = "Constraint-based morphological disambiguation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tag a text file.
    Tag(TagArgs),
    /// Parse and lint a rule file.
    CheckRules {
        /// Rule file.
        path: PathBuf,
    },
    /// Serve interactive resolution sessions over HTTP.
    Serve {
        #[command(flatten)]
        resources: Resources,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Other(e.to_string());
    match cli.command {
        Command::Tag(args) => {
            let summary = commands::tag(&args)?;
            writeln!(out, "{summary}").map_err(io)
        }
        Command::CheckRules { path } => {
            let report = commands::check_rules(&path)?;
            out.write_all(report.as_bytes()).map_err(io)
        }
        Command::Serve {
            resources,
            port,
            host,
        } => {
            let (rules, lexicon) = resources.load()?;
            let state = server::AppState::new(rules, lexicon, Execution::default());
            let rt = tokio::runtime::Runtime::new().map_err(io)?;
            rt.block_on(server::serve(state, &host, port)).map_err(io)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
