use std::process::ExitCode;

use clap::Parser;
use hyphull_std::args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Estimate(a) => hyphull_std::app::estimate(a),
        Command::Exact(a) => hyphull_std::app::exact(a),
        Command::Figure(a) => hyphull_std::app::figure(a),
        Command::Selftest(a) => hyphull_std::app::selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
