//! Command-line front end for the descent engine: exact power sums, their
//! p-adic valuations, tables, and the verification harness, with a
//! persistent result cache.

pub mod cache;
pub mod error;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use descent_core::padic::valuation;
use descent_core::{Engine, Limits, PowerSumSource, Prime};

use crate::cache::Cache;
use crate::error::{CliError, Result};
use crate::table::{Format, Span, TableSpec};
use crate::verify::{Suite, VerifyLimits};

#[derive(Debug, Parser)]
#[command(name = "descent", version, about = "Exact power sums of the descent set statistic")]
pub struct Cli {
    /// JSON file of cached power sums.
    #[arg(long, global = true, env = "DESCENT_CACHE", value_name = "PATH")]
    pub cache: Option<PathBuf>,

    /// Worker threads for enumeration; defaults to the available parallelism.
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print A^R_N.
    Apow { n: u32, r: u32 },
    /// Print the P-adic valuation of A^R_N.
    Valuation { n: u32, r: u32, p: u32 },
    /// Tabulate valuations, rows n and columns r.
    Table {
        #[arg(long)]
        p: u32,
        #[arg(long, value_name = "A..B")]
        n: Span,
        #[arg(long, value_name = "C..D")]
        r: Span,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run a verification suite; JSON report on stdout, summary on stderr.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        r_max: Option<u32>,
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<u32>>,
        /// Raise the default n limit from 16 to 20.
        #[arg(long)]
        extended: bool,
    },
}

fn prime(p: u32) -> Result<Prime> {
    Prime::new(p).map_err(|_| CliError::usage(format!("{p} is not a prime")))
}

fn positive(what: &str, v: u32) -> Result<()> {
    if v == 0 {
        return Err(CliError::usage(format!("{what} must be positive")));
    }
    Ok(())
}

fn workers(threads: Option<u32>) -> usize {
    threads.map(|t| t as usize).unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    })
}

/// Runs one command, writing results to `out`. Returns whether every check held.
pub fn execute(cli: &Cli, cache: &Cache, out: &mut dyn Write) -> Result<bool> {
    let io = |source| CliError::Io {
        path: "stdout".into(),
        source,
    };
    match &cli.command {
        Command::Apow { n, r } => {
            positive("n", *n)?;
            positive("r", *r)?;
            writeln!(out, "{}", cache.power_sum(*n, *r)?).map_err(io)?;
        }
        Command::Valuation { n, r, p } => {
            positive("n", *n)?;
            positive("r", *r)?;
            let p = prime(*p)?;
            writeln!(out, "{}", valuation(&cache.power_sum(*n, *r)?, p)?).map_err(io)?;
        }
        Command::Table { p, n, r, format } => {
            let spec = TableSpec {
                p: prime(*p)?,
                n: n.clone(),
                r: r.clone(),
                format: *format,
            };
            out.write_all(table::render(cache, &spec)?.as_bytes()).map_err(io)?;
        }
        Command::Verify {
            suite,
            n_max,
            r_max,
            p_list,
            extended,
        } => {
            let mut limits = VerifyLimits::new(*extended);
            if let Some(n) = n_max {
                positive("--n-max", *n)?;
                limits.n_max = *n;
            }
            if let Some(r) = r_max {
                positive("--r-max", *r)?;
                limits.r_max = *r;
            }
            if let Some(ps) = p_list {
                limits.primes = ps.iter().map(|&p| prime(p)).collect::<Result<_>>()?;
            }
            let max_n = cache.engine().limits().max_n;
            if limits.n_max > max_n {
                return Err(descent_core::Error::Capacity {
                    what: "--n-max",
                    requested: limits.n_max as u64,
                    limit: max_n as u64,
                }
                .into());
            }
            let report = verify::run(cache, *suite, &limits, cache.engine().limits())?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            writeln!(out, "{json}").map_err(io)?;
            eprint!("{}", report.summary());
            return Ok(report.holds());
        }
    }
    Ok(true)
}

/// Parses `args`, runs the command against the configured cache, and maps
/// the outcome to the documented exit codes.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let engine = Engine::new(Limits::default(), workers(cli.threads));
    let cache = match &cli.cache {
        Some(path) => Cache::open(engine, path),
        None => Cache::in_memory(engine),
    };
    for w in cache.warnings() {
        eprintln!("warning: {w}");
    }
    let stdout = std::io::stdout();
    let outcome = execute(&cli, &cache, &mut stdout.lock());
    let saved = cache.save();
    match (outcome, saved) {
        (Err(e), _) | (Ok(_), Err(e)) => {
            eprintln!("error: {e}");
            (&e).into()
        }
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), Ok(())) => ExitCode::from(1),
    }
}
