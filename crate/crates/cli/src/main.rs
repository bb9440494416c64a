use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use faddeev_cli::{run, Command, Invocation};

/// Numerical experiments for the equivariant Faddeev wave equation.
#[derive(Parser)]
#[command(name = "faddeev", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inv = Invocation { command: args.command, config: args.config, out: args.out, seed: args.seed, threads: args.threads };
    match run(&inv) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("faddeev: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
