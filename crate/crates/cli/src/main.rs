use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use eoa_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(outcome.report.render(cli.format).as_bytes()) {
                eprintln!("eoa: cannot write report: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("eoa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
