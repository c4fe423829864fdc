use std::process::ExitCode;

use clap::{Parser, Subcommand};
use logifold::commands::{self, CombineArgs, CompileArgs, TheoryArgs};

/// Linear logical graphs and certainty-restricted model combination.
#[derive(Parser)]
#[command(name = "logifold", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a ReLU network into a (fuzzy) linear logical graph.
    Compile(CompileArgs),
    /// Combine prediction files by refined voting and print the accuracy table.
    Combine(CombineArgs),
    /// Probe the dyadic step-function example with exact arithmetic.
    Theory(TheoryArgs),
}

fn configure_threads() {
    if let Some(n) = std::env::var("LOGIFOLD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Compile(args) => commands::compile(args),
        Command::Combine(args) => commands::combine(args).map(|table| {
            eprintln!("# seed={} charts={}", args.seed, args.predictions.len());
            if args.out.is_some() {
                String::new()
            } else {
                table
            }
        }),
        Command::Theory(args) => commands::theory(args),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}
