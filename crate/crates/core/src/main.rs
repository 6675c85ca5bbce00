use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynfgt::cli::{self, BenchConfig, BuildOptions, CliError};

/// Dynamic fast Gaussian transform over point files.
#[derive(Debug, Parser)]
#[command(name = "dynfgt", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a state file from rows `x1,...,xd,q`.
    Build {
        sources: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long)]
        capacity: Option<f64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print the approximate transform at each target.
    Query { state: PathBuf, targets: PathBuf },
    /// Apply `I x.. q` / `D x..` lines and rewrite the state.
    Update { state: PathBuf, ops: PathBuf },
    /// Approximate kernel mat-vec with one charge per line.
    Matvec { state: PathBuf, charges: PathBuf },
    /// Compare queries against direct summation.
    Verify {
        state: PathBuf,
        targets: PathBuf,
        /// Tolerance override; defaults to the state's eps.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Median operation latencies as CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        ops: usize,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match command {
        Command::Build {
            sources,
            delta,
            eps,
            r,
            capacity,
            out: path,
        } => cli::cmd_build(&sources, &BuildOptions { delta, eps, r, capacity }, &path),
        Command::Query { state, targets } => cli::cmd_query(&state, &targets, &mut out),
        Command::Update { state, ops } => cli::cmd_update(&state, &ops),
        Command::Matvec { state, charges } => cli::cmd_matvec(&state, &charges, &mut out),
        Command::Verify { state, targets, eps } => cli::cmd_verify(&state, &targets, eps, &mut out),
        Command::Bench {
            dims,
            sizes,
            delta,
            eps,
            seed,
            ops,
        } => {
            let cfg = BenchConfig {
                dims,
                sizes,
                delta,
                eps,
                seed,
                ops,
            };
            cli::run_bench(&cfg, &mut out).map(|_| ())
        }
    };
    let flushed = out.flush();
    result?;
    flushed.map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dynfgt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
