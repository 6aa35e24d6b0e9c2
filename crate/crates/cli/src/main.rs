use std::process::ExitCode;

use clap::Parser;

use wellround_cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    // Clap exits with 2 on usage errors and 0 for --help/--version.
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("{}", e.to_json());
        return ExitCode::from(e.exit_code());
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
