mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Status;

const EXIT_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn run(cli: &Cli) -> anyhow::Result<Status> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()?;
    match &cli.command {
        Command::Decode(a) => commands::decode(a),
        Command::Convert(a) => commands::convert(a),
        Command::Validate(a) => commands::validate(a),
        Command::Eval(a) => commands::eval(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Bench(a) => commands::bench(a),
        Command::GradCheck(a) => commands::grad_check(a),
        Command::Loss(a) => commands::loss(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
