use std::fs;
use std::process::ExitCode;

use clap::Parser;
use orthotract_cli::commands::{error_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(error_code(&e) as u8);
        }
    };
    if let (Some(path), Some(p)) = (&cli.out, &report.payload) {
        if let Err(e) = fs::write(path, p) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    print!("{}", report.render(cli.format, cli.out.is_some()));
    ExitCode::from(report.code as u8)
}
