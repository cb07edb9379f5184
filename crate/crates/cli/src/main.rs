use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use args::{Cli, Command};
use commands::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors.
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Factor(a) => commands::factor(&a),
        Command::SweepCond(a) => commands::sweep_cond(&a),
        Command::SweepPanels(a) => commands::sweep_panels(&a),
        Command::Cost(a) => commands::cost(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Breakdown) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
