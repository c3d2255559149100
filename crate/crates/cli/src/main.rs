use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    tonestack_cli::run(&tonestack_cli::Cli::parse())
}
