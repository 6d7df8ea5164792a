use std::process::ExitCode;

use clap::Parser;
use rcd::{Cli, Command, RunConfig};

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    let config = match RunConfig::from_args(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match rcd::run(&config) {
        Ok(artifacts) => {
            for p in artifacts.dumps.iter().chain(&artifacts.residuals).chain(&artifacts.timings) {
                println!("{}", p.display());
            }
            if let Some(p) = artifacts.table {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
