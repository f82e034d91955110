use std::process::ExitCode;

use clap::Parser;
use creutz_ladder::error::EXIT_CONFIG;
use creutz_ladder::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("creutz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
