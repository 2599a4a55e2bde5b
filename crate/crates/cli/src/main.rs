use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mtfedge_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.text.as_bytes());
            if outcome.code != 0 {
                eprintln!("mtfedge: no edges found");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("mtfedge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
