use std::process::ExitCode;

use clap::Parser;
use qlattice_cli::{run, Cli, SweepConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = SweepConfig::resolve(cli).and_then(|config| run(&config));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qlattice: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
