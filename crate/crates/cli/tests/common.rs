//! Helpers shared by the CLI integration tests.
#![allow(dead_code)]

use clap::Parser;
use gheb_cli::{run, Cli, Outcome};

pub const WORKED: &str = "(y^2-1)^2 + (x*y-1)^2";

/// Polynomials exercised by the schema and containment suites. Each entry
/// is the polynomial text and whether its Fedoryuk estimate is expected to
/// be a finite set.
pub const FIXTURES: &[(&str, bool)] = &[
    (WORKED, true),
    ("x^2 + y^2", true),
    ("x", true),
    ("x^2*y^2 + x^2", true),
    ("(x^2 + (x*y - 1)^2)*(3 - x)", true),
    ("x + x^2*y + x^4*y*z", false),
];

pub fn cli(args: &[&str]) -> Outcome {
    let mut full = vec!["gheb"];
    full.extend_from_slice(args);
    run(&Cli::try_parse_from(full).expect("flags parse"))
}
