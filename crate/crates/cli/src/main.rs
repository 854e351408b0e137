use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use treesec_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli) {
        Ok(out) => {
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(out) = &e.output {
                let _ = stdout.write_all(out.as_bytes());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
