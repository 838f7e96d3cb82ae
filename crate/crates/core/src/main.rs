use std::process::ExitCode;

use clap::Parser;
use wbider::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse()).into()
}
