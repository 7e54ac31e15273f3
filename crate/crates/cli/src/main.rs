use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use gheb_cli::{run, Cli, Exit};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Some(msg) = &outcome.message {
        eprintln!("gheb: {msg}");
    }
    let mut exit = outcome.exit;
    if !outcome.output.is_empty() {
        let written = match &cli.command.common().out {
            Some(path) => fs::write(path, &outcome.output),
            None => std::io::stdout().write_all(outcome.output.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("gheb: cannot write output: {e}");
            exit = Exit::Failure;
        }
    }
    ExitCode::from(exit.code() as u8)
}
