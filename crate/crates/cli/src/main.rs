//! `fraclab`: builds fractal sets and measures from a TOML config and writes
//! dimension fits, Fourier averages and inequality reports as CSV/JSON.
//!
//! Exit codes: 0 success, 1 invalid input (including a violated hypothesis
//! or the alias guard), 2 size cap, 3 I/O, 4 a check verdict was not
//! accepted.

mod artifacts;
mod commands;
mod config;
mod failure;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artifacts::Artifacts;
use config::RunConfig;
use failure::{Failure, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "fraclab",
    version,
    about = "Fractal sets, fractal measures and their Fourier transforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the computational kernels.
    #[arg(long, global = true, env = "FRACLAB_THREADS")]
    threads: Option<usize>,
    /// Accept Inconclusive verdicts in `check` and `all`.
    #[arg(long, global = true)]
    allow_inconclusive: bool,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum Command {
    /// Write the point cloud and the measure.
    Construct,
    /// Fit covering and packing exponents over the scale grid.
    Dim,
    /// Write the ball or Gaussian average series and a plot script.
    Fourier,
    /// Evaluate the configured inequalities.
    Check,
    /// construct, dim, fourier and check in one run.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Construct => "construct",
            Command::Dim => "dim",
            Command::Fourier => "fourier",
            Command::Check => "check",
            Command::All => "all",
        }
    }
}

fn execute(cli: &Cli) -> Outcome<()> {
    let Some(path) = &cli.config else {
        return Err(Failure::Validation("--config <path> is required".into()));
    };
    let config = RunConfig::load(path, cli.seed, cli.out.as_deref())?;
    let threads = match cli.threads {
        Some(0) => return Err(Failure::Validation("--threads must be at least 1".into())),
        Some(n) => {
            // A pool built earlier in the same process (tests) stays in place.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            n
        }
        None => rayon::current_num_threads(),
    };
    let mut out = Artifacts::create(&config.output_dir)?;
    let result = match cli.command {
        Command::Construct => commands::construct(&config, &mut out),
        Command::Dim => commands::dim(&config, &mut out),
        Command::Fourier => commands::fourier(&config, &mut out),
        Command::Check => commands::check(&config, &mut out, cli.allow_inconclusive),
        Command::All => commands::construct(&config, &mut out)
            .and_then(|_| commands::dim(&config, &mut out))
            .and_then(|_| commands::fourier(&config, &mut out))
            .and_then(|_| commands::check(&config, &mut out, cli.allow_inconclusive)),
    };
    // Reports behind a rejected verdict are still worth keeping.
    if result.is_ok() || matches!(result, Err(Failure::Verdict(_))) {
        let dir = out.dir().display().to_string();
        let files = out.finish(cli.command.name(), &config, threads)?;
        println!("wrote {} files to {dir}", files.len());
    }
    result
}

fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("fraclab {}: {failure}", cli.command.name());
            failure.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
