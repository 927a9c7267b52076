//! Thin binary wrapper: parse arguments, run the requested checks, emit
//! the report, and map outcomes to the exit-code contract.

use std::process::exit;

use clap::Parser;
use fkt_core::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    match cli::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = cli::emit(&cli, &outcome) {
                eprintln!("fkt: failed to write output: {e}");
                exit(cli::EXIT_INTERNAL);
            }
            exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("fkt: {e}");
            exit(cli::exit_code_for_error(&e));
        }
    }
}
