use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match maglat_cli::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are successful runs.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(maglat_cli::run(&cli))
}
