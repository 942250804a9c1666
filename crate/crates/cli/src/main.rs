//! `plurigeo`: plurigenera, basket inequalities, proof certificates and
//! candidate enumeration from the command line.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical violation was found,
//! 2 invalid input, 3 I/O failure.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Why a command did not succeed.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn violation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "plurigeo", version, about = "Exact basket calculus for terminal 3-folds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate χ(mK) and P_m for an invariants document.
    Pluri {
        /// Document path; standard input when omitted.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        m_from: u64,
        #[arg(long, default_value_t = 13)]
        m_to: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check one inequality: 1 and 2 on plurigenera, 3 and 4 on a basket.
    Ineq {
        input: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// Inline basket such as `[[1,5],[1,6]]`, for forms 3 and 4.
        #[arg(long)]
        basket: Option<String>,
    },
    /// Build the single-basket certificate for every point with r <= r_max.
    Replay {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        r_max: u64,
        /// Certificate destination.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Independently re-check a certificate file.
    VerifyCert { input: Option<PathBuf> },
    /// Enumerate candidate baskets and invariants from a constraints file.
    Enumerate {
        input: Option<PathBuf>,
        /// Emit baskets only, without χ or K³.
        #[arg(long)]
        baskets_only: bool,
        /// Also report the smallest m with P_m >= 2 for every candidate.
        #[arg(long)]
        find_m0: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Derive the constant chain from m0.
    Constants {
        #[arg(long, default_value_t = 120)]
        m0: u64,
    },
    /// Exhaustively check the mediant-sum lemmas on small unimodular pairs.
    Lemmas {
        #[arg(long, default_value_t = 10)]
        r1_max: u64,
        #[arg(long, default_value_t = 10)]
        r2_max: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Runs `f` on a pool of `jobs` workers, or the global pool.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Failure::input("--jobs must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Failure::io(format!("cannot start worker pool: {e}"))),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Pluri { input, m_from, m_to, format } => {
            commands::pluri(input.as_deref(), m_from, m_to, format)
        }
        Command::Ineq { input, which, basket } => commands::ineq(input.as_deref(), which, basket.as_deref()),
        Command::Replay { which, r_max, out, jobs } => {
            with_jobs(jobs, || commands::replay(which, r_max, out.as_deref()))?
        }
        Command::VerifyCert { input } => commands::verify_cert(input.as_deref()),
        Command::Enumerate { input, baskets_only, find_m0, jobs } => {
            with_jobs(jobs, || commands::enumerate(input.as_deref(), baskets_only, find_m0))?
        }
        Command::Constants { m0 } => commands::constants(m0),
        Command::Lemmas { r1_max, r2_max, jobs } => with_jobs(jobs, || commands::lemmas(r1_max, r2_max))?,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { code, message }) => {
            // Violations still carry the report on standard output.
            if code == 1 {
                print!("{message}");
            } else {
                eprintln!("plurigeo: {message}");
            }
            ExitCode::from(code)
        }
    }
}
