mod args;
mod output;
mod parse;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Common};
use run::{CliResult, Outcome};

fn dispatch(cmd: &Command) -> (CliResult<Outcome>, &Common) {
    match cmd {
        Command::Centred(a) => (run::centred(a), &a.common),
        Command::Packing(a) => (run::packing(a), &a.common),
        Command::Spherical(a) => (run::spherical(a), &a.common),
        Command::Table(a) => (run::table(a), &a.common),
        Command::Profile(a) => (run::profile(a), &a.common),
        Command::RestrictedBall(a) => (run::restricted_ball(a), &a.common),
    }
}

fn emit(text: &str, common: &Common) -> std::io::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, common) = dispatch(&cli.command);
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.text, common) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.mismatch {
                eprintln!("computed values differ from the reference table");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
