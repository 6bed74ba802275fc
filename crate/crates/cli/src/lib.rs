//! Command-line front end: character tables, zero archives, kernel sweeps,
//! explicit-formula residuals, density tables and bound audits.
//!
//! Every subcommand writes JSON (or CSV where the data is tabular) to stdout
//! or `--out`, and optionally a two-column plot CSV to `--plot`. Exit status
//! is 0 on success, 1 when a verification fails (after the full report has
//! been written) and 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod sampling;
pub mod select;

pub use config::{FileConfig, CONFIG_ENV};
pub use select::{QRange, Selector};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliAuditMode {
    #[value(name = "theorem12", alias = "theorem_1_2")]
    Theorem12,
    #[value(name = "theorem13", alias = "theorem_1_3")]
    Theorem13,
    #[value(name = "theorem13-centered", alias = "theorem_1_3_centered")]
    Theorem13Centered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliVariant {
    /// (x − n)-weighted sum
    Theorem1,
    /// windowed w(n)-weighted sum
    Theorem2,
}

#[derive(Debug, Parser)]
#[command(
    name = "nonres",
    version,
    about = "Least character non-residues, L-function zeros and explicit-formula checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format (default json; nonres defaults to csv)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write two-column plot data here
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    /// Disable data-parallel execution
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Directory holding config.toml
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ModuliArgs {
    /// Single modulus
    #[arg(long)]
    pub q: Option<u64>,
    /// Inclusive modulus range a..b
    #[arg(long)]
    pub q_range: Option<QRange>,
    /// all, quadratic, primitive or a label q.n
    #[arg(long, default_value = "all")]
    pub select: Selector,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the characters modulo q
    Chars {
        #[arg(long)]
        q: u64,
    },
    /// Table of least non-residues n(χ)
    Nonres {
        #[command(flatten)]
        moduli: ModuliArgs,
    },
    /// Scan for zeros and maintain a zero archive
    Zeros {
        #[command(flatten)]
        moduli: ModuliArgs,
        /// Completeness height T
        #[arg(long)]
        height: Option<f64>,
        /// Critical-line scan step
        #[arg(long)]
        step: Option<f64>,
        /// Archive CSV to load, extend and save
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Kernel closed form against quadrature at seeded random points
    KernelCheck {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest acceptable relative error
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Explicit-formula residual for one primitive character
    Explicit {
        #[arg(long)]
        label: nonres_core::CharacterLabel,
        #[arg(long, value_enum, default_value = "theorem2")]
        variant: CliVariant,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        t0: Option<f64>,
        /// Use y = y_k = exp(π(2k+1)/(2|t0|))
        #[arg(long, conflicts_with = "y")]
        k: Option<u32>,
        #[arg(long)]
        y: Option<f64>,
        /// Truncation height T
        #[arg(long, default_value_t = 60.0)]
        height: f64,
        #[arg(long)]
        archive: Option<PathBuf>,
        /// Largest acceptable residual_scale
        #[arg(long, default_value_t = 0.15)]
        max_residual: f64,
    },
    /// Zero-density ratios and fitted constants
    Density {
        #[command(flatten)]
        moduli: ModuliArgs,
        /// Largest window start T
        #[arg(long, default_value_t = 50)]
        t_max: u32,
        #[arg(long)]
        archive: Option<PathBuf>,
        /// Include every window and disc row
        #[arg(long)]
        detail: bool,
    },
    /// Audit n(χ) against a conditional bound
    Audit {
        #[command(flatten)]
        moduli: ModuliArgs,
        #[arg(long, value_enum)]
        mode: CliAuditMode,
        /// Restrict a range to odd primes
        #[arg(long)]
        primes_only: bool,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long = "K1", default_value_t = 1.0)]
        k1: f64,
        #[arg(long = "K2", default_value_t = 1.0)]
        k2: f64,
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        /// Archive height (default: the hypothesis region)
        #[arg(long)]
        height: Option<f64>,
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Principal-character main term against 4x/t0²
    MainTerm {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, conflicts_with = "y")]
        k: Option<u32>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        x: f64,
        /// With --k, use y = exp(π(k+1)/|t0|) where sin(t0 log y) = 0
        #[arg(long, requires = "k")]
        off_resonance: bool,
        /// Largest acceptable relative gap when sin² = 1
        #[arg(long, default_value_t = 0.3)]
        max_gap: f64,
    },
}

/// Rendered artifacts of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: String,
    pub plot: Option<String>,
    /// false when a verification failed
    pub verified: bool,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn ok(report: String) -> Self {
        Self { report, plot: None, verified: true, failure: None }
    }

    pub fn check(mut self, verified: bool, failure: impl FnOnce() -> String) -> Self {
        if !verified {
            self.verified = false;
            self.failure = Some(failure());
        }
        self
    }
}

/// Runs a parsed command and returns its rendered artifacts without writing them.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let file = FileConfig::load(cli.global.config_dir.as_deref())?;
    commands::dispatch(cli, &file)
}

/// Parses `args`, runs, writes artifacts and maps the result to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|o| write_outcome(&cli, &o).map(|()| o));
    match result {
        Ok(o) if o.verified => ExitCode::SUCCESS,
        Ok(o) => {
            eprintln!("verification failed: {}", o.failure.unwrap_or_default());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn write_outcome(cli: &Cli, o: &Outcome) -> Result<(), CliError> {
    let io = |p: &std::path::Path, e: std::io::Error| CliError::Failed(format!("cannot write {}: {e}", p.display()));
    match &cli.global.out {
        Some(p) => std::fs::write(p, &o.report).map_err(|e| io(p, e))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(o.report.as_bytes()).and_then(|()| out.flush()).map_err(|e| io("stdout".as_ref(), e))?;
        }
    }
    if let (Some(p), Some(plot)) = (&cli.global.plot, &o.plot) {
        std::fs::write(p, plot).map_err(|e| io(p, e))?;
    }
    Ok(())
}
