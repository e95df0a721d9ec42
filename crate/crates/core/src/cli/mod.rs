//! The `overlap-lab` command line: argument parsing, dispatch, output files
//! and exit codes.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::error::Error;
use config::{ConfigFile, Overrides, RunConfig};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_STRICT: i32 = 4;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "OVERLAP_LAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("warnings escalated by --strict: {}", .0.join("; "))]
    Strict(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Lib(Error::Budget { .. }) => EXIT_BUDGET,
            CliError::Strict(_) => EXIT_STRICT,
            CliError::Lib(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "overlap-lab", version, about = "Overlap numbers and dimension bounds for affine IFS with overlaps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (CSV or JSON depending on the command); stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Treat warnings as failures.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads (default: OVERLAP_LAB_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write a gnuplot script next to the CSV output.
    #[arg(long, global = true)]
    pub gnuplot: bool,
}

#[derive(Debug, Args, Default)]
pub struct EstimateArgs {
    /// Depth range `a:b:c` or `a:b`.
    #[arg(long)]
    pub depths: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Birkhoff tolerance, or `inf`.
    #[arg(long)]
    pub tau: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Everything: estimates, closed forms, bounds and dimension bounds (JSON).
    Analyze(EstimateArgs),
    /// Per-depth covering-word statistics (CSV).
    Overlap(EstimateArgs),
    /// Distinct depth-n values with multiplicities (CSV).
    Spectrum {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Blocks, overlap families and the bounds they imply (JSON).
    Structure {
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Dimension bounds for a chosen log o (JSON).
    Bound {
        /// `from:estimate`, `from:blocks`, `from:closed-form`, `from:families` or a number.
        #[arg(long = "log-o")]
        log_o: Option<String>,
        #[command(flatten)]
        estimate: EstimateArgs,
    },
    /// Empirical box-counting dimension of the projected measure (CSV).
    Empdim {
        #[arg(long)]
        samples: Option<usize>,
        /// Scale exponents `a:b`: box sides are length(hull)·2^-k.
        #[arg(long)]
        scales: Option<String>,
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Headline quantities over a parameter grid (CSV).
    Sweep {
        /// Float grid `a:b:c` for the parameter.
        #[arg(long)]
        lambda: Option<String>,
        #[command(flatten)]
        estimate: EstimateArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Overlap(_) => "overlap",
            Command::Spectrum { .. } => "spectrum",
            Command::Structure { .. } => "structure",
            Command::Bound { .. } => "bound",
            Command::Empdim { .. } => "empdim",
            Command::Sweep { .. } => "sweep",
        }
    }

    fn overrides(&self, seed: Option<u64>) -> Overrides {
        let mut o = Overrides { seed, ..Default::default() };
        let mut take = |e: &EstimateArgs| {
            o.depths = e.depths.clone();
            o.samples = e.samples;
            o.tau = e.tau.clone();
        };
        match self {
            Command::Analyze(e) | Command::Overlap(e) => take(e),
            Command::Bound { estimate, .. } | Command::Sweep { estimate, .. } => take(estimate),
            _ => {}
        }
        match self {
            Command::Spectrum { depth, budget } => {
                o.spectrum_depth = *depth;
                o.budget = *budget;
            }
            Command::Structure { p, kmax, threshold, budget } => {
                o.p = *p;
                o.kmax = *kmax;
                o.threshold = *threshold;
                o.budget = *budget;
            }
            Command::Bound { log_o, .. } => o.log_o = log_o.clone(),
            Command::Empdim { samples, scales, mass } => {
                o.empdim_samples = *samples;
                o.scales = scales.clone();
                o.mass = *mass;
            }
            Command::Sweep { lambda, .. } => o.lambda = lambda.clone(),
            _ => {}
        }
        o
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return if n == 0 { Err(CliError::Config("--threads must be positive".into())) } else { Ok(Some(n)) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs a parsed command line and returns the warnings produced.
pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let path = cli
        .global
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let file = ConfigFile::load(path)?;
    let (config, system) = RunConfig::resolve(&file, &cli.command.overrides(cli.global.seed))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.global.threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let warnings = pool.install(|| commands::dispatch(&cli.command, &config, &system, &cli.global))?;
    if cli.global.strict && !warnings.is_empty() {
        return Err(CliError::Strict(warnings));
    }
    Ok(warnings)
}

/// Parses `args`, runs, reports on stderr and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
