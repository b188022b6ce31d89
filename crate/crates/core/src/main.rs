use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use resolvent_roots::cli::{emit_outputs, run_pipeline, Cli, Command, ExitStatus, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(ExitStatus::InputError.code() as u8),
            };
        }
    };
    let Command::Solve(args) = cli.command;
    let cfg = match RunConfig::from_args(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::InputError.code() as u8);
        }
    };
    let report = match run_pipeline(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::InputError.code() as u8);
        }
    };
    match emit_outputs(&report, &cfg) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::InputError.code() as u8);
        }
    }
    ExitCode::from(report.exit_status.code() as u8)
}
