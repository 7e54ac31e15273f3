//! Command-line front end for `gheb-core`: flag handling, the `analyze`,
//! `classify`, `verify` and `psi` subcommands, and the JSON report they
//! write.
//!
//! The binary is a thin wrapper around [`commands::run`], which returns the
//! rendered output together with the exit code. Exit codes are part of the
//! interface: 0 on success, 2 for unreadable input, 3 when every result rests
//! on inconclusive evidence and 4 when a requested level has an empty
//! sublevel set.

pub mod args;
pub mod commands;
pub mod report;

pub use args::{Cli, Command, CommonArgs, Format};
pub use commands::{run, Exit, Outcome};
pub use report::AnalysisReport;
