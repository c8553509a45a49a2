use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use embtensor_cli::commands::Command;
use embtensor_cli::execute;
use embtensor_cli::render::{render, Format};

/// Exact checks for Lie[1]∞ and Loday[1]∞ structures, coherent actions and
/// embedding tensors.
///
/// Exit codes: 0 verified or constructed, 1 an identity fails, 2 input error,
/// 3 internal inconsistency.
#[derive(Parser, Debug)]
#[command(name = "embtensor", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Structure file.
    input: PathBuf,
    /// Weight bound N; overrides `bound` in [settings].
    #[arg(long)]
    bound: Option<usize>,
    /// Seed for generated candidates; overrides `seed` in [settings].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let result = execute(args.command, &args.input, args.bound, args.seed);
    let code = match result {
        Ok(report) => {
            print!("{}", render(&report, args.format));
            report.verdict.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
