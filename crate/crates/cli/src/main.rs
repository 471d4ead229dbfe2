use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hotelling_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = cli.command.out().map(|p| p.to_path_buf());
    let output = match run(cli.command) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &out {
        Some(path) => fs::write(path, &output.text),
        None => std::io::stdout().write_all(output.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    if let Some(note) = &output.note {
        eprintln!("{note}");
    }
    ExitCode::from(output.status.code() as u8)
}
