use std::process::ExitCode;

use clap::Parser;
use manifold_cli::cli::Cli;
use manifold_cli::{commands, configure_threads};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| commands::run(cli.command))
        .and_then(|output| output.emit());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
