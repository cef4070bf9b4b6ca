use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use fundet::cli::{execute, Cli, CliError};

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let mut out: Box<dyn Write> = match &cli.global.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let status = match execute(cli, &mut out, &mut io::stderr()) {
        Ok(s) => s,
        Err(e @ CliError::Degenerate(_)) => {
            println!("{}", e.to_json());
            eprintln!("error: {e}");
            return Ok(ExitCode::from(e.exit_code()));
        }
        Err(e) => return Err(e.into()),
    };
    out.flush().context("writing output")?;
    Ok(ExitCode::from(status.exit_code()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
