mod bench;
mod gen;
mod input;
mod solve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exact maximum stable set and maximum clique, guided by the Lovász theta
/// relaxation.
#[derive(Debug, Parser)]
#[command(name = "theta-guide", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and print its report.
    Solve(solve::SolveArgs),
    /// Write a seeded random graph in DIMACS format.
    Gen(gen::GenArgs),
    /// Run a manifest of instances and methods, one CSV row each.
    Bench(bench::BenchArgs),
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("THETA_GUIDE_LOG", "warn");
    env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging();
    let result = match cli.command {
        Command::Solve(args) => solve::run(args),
        Command::Gen(args) => gen::run(args).map(|()| 0),
        Command::Bench(args) => bench::run(args).map(|()| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
