use std::process::ExitCode;

use clap::Parser;
use xyphase_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = cli.resolve().and_then(|config| execute(&config));
    match result {
        Ok(output) => {
            print!("{}", output.summary);
            for (path, _) in &output.files {
                println!("wrote {}", path.display());
            }
            match output.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
