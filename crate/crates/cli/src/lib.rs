//! Command-line front end: every analysis of the `partial-search` library as
//! a CSV- or JSON-emitting subcommand.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod output;

pub use output::{Cell, Format, OutputRecord};

/// Exit code for domain and constraint errors.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "partial-search",
    version,
    about = "Quantum partial search: dynamics, optimal sequences, bounds and parallel schemes"
)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "PARTIAL_SEARCH_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Qubit count; the database holds 2^n items.
    #[arg(long)]
    pub n: u32,
    /// Block qubit count; blocks hold 2^m items.
    #[arg(long)]
    pub m: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sizes and rotation angles of a search space.
    Angles(SpaceArgs),

    /// Apply one operator sequence and report its success probabilities.
    Simulate {
        #[command(flatten)]
        space: SpaceArgs,
        /// Queries in application order, e.g. `g:4,l:2,g:1`.
        #[arg(long)]
        seq: String,
    },

    /// Best block probability over every sequence of k_tot queries.
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        /// A single budget `k` or an inclusive range `a..b`.
        #[arg(long, value_parser = parse_range)]
        ktot: RangeInclusive<u64>,
        /// List every co-optimal sequence instead of the canonical one.
        #[arg(long)]
        all_ties: bool,
    },

    /// Optimal sequences for every (m, k_tot) of an n-qubit database.
    Tables {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        which: TableKind,
        /// Budgets to tabulate.
        #[arg(long, value_parser = parse_range, default_value = "2..11")]
        ktot: RangeInclusive<u64>,
    },

    /// Closed-form bounds and the numeric sweeps they are compared with.
    Bounds {
        #[arg(long)]
        n: u32,
        /// Block qubit count (required except for `--data fig4`).
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, value_enum, default_value_t = BoundsData::Summary)]
        data: BoundsData,
        /// Budgets for `--data fig3` (default `1..⌈π√N/4⌉`).
        #[arg(long, value_parser = parse_range)]
        ktot_range: Option<RangeInclusive<u64>>,
    },

    /// Optimal expected iterations of the parallel schemes.
    Parallel {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Qubit count (for `table4`, a comma-separated list; default 18,21,24,27).
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        /// QPU counts, comma-separated (default: 1..n and powers of two up to N).
        #[arg(long, value_delimiter = ',')]
        l: Vec<u64>,
        /// Hybrid scheme: restrict to k2 = 0.
        #[arg(long)]
        no_k2: bool,
    },

    /// Check the three-dimensional model against a full state-vector run.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// Number of random sequences.
        #[arg(long, default_value_t = 200)]
        sequences: usize,
        /// Longest random sequence.
        #[arg(long, default_value_t = 40)]
        max_k: u32,
        /// Largest tolerated amplitude deviation.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = partial_search::statevec::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Success probabilities in percent.
    Pr,
    /// Expected iteration numbers.
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundsData {
    /// Constants and per-space closed forms.
    Summary,
    /// Probability bound versus numeric GRK optimum per k_tot.
    Fig3,
    /// Minimal expected iterations per m.
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Inner,
    Outer,
    Grk,
    Hybrid,
    /// All four schemes at every l.
    Compare,
    /// Hybrid optima with and without a local run, l = 3.
    Table4,
}

/// Parses `k` or `a..b` (inclusive).
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("invalid integer {t:?}"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

/// Runs the command line `args` (program name first), writing results to
/// `stdout` unless `--out` is given. Returns the process exit code.
pub fn run<I, T, W>(args: I, stdout: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = e.print();
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) if is_broken_pipe(&e) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}

// A reader such as `head` closing the pipe early is not a failure.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|ce| {
                matches!(ce.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
            })
    })
}

fn execute<W: Write>(cli: &Cli, stdout: &mut W) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(anyhow!("--workers must be at least 1"));
        }
        pool = pool.num_threads(workers);
    }
    let pool = pool.build().context("cannot start worker pool")?;
    let record = pool.install(|| commands::dispatch(&cli.command))?;
    match &cli.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            record.write(cli.format, &mut w)?;
            w.flush()?;
        }
        None => record.write(cli.format, stdout)?,
    }
    Ok(())
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    run(std::env::args_os(), &mut lock)
}
