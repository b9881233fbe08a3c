mod commands;
mod config_args;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchArgs, GenArgs, ReportArgs, RunArgs, TracksArgs};

/// Optical-flow sensor emulator and benchmark harness.
#[derive(Parser)]
#[command(name = "ofsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic sequence directory.
    Gen(GenArgs),
    /// Run the pipeline over a sequence directory or a synthetic scenario.
    Run(RunArgs),
    /// Measure per-stage throughput.
    Bench(BenchArgs),
    /// Link and summarise tracks from an .ofv stream.
    Tracks(TracksArgs),
    /// Write accuracy and summary CSVs for an .ofv stream.
    Report(ReportArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Run(a) => commands::run(a),
        Command::Bench(a) => commands::bench(a),
        Command::Tracks(a) => commands::tracks(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
