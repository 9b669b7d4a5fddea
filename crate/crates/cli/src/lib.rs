//! Command-line driver: foliation reports, holonomy atlases, fixed-point
//! tracking and growth studies. Every run is determined by its config and
//! seed; the thread count only changes speed.

mod analyze;
mod growth;
mod holonomy;
pub mod report;
pub mod svg;
mod track;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "holofol", version, about = "Polynomial foliations, holonomy and germ groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a foliation, locate and classify its singularities.
    Analyze(AnalyzeArgs),
    /// Holonomy generators of the line at infinity, fixed-point atlas and coverage.
    Holonomy(HolonomyArgs),
    /// Track fixed points of words along a deformation.
    Track(TrackArgs),
    /// Growth function, derived series and limit homomorphism of a jet group.
    Growth(GrowthArgs),
}

/// Flags shared by all commands. `out` and `threads` do not enter the
/// config hash.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Input JSON document.
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Main solver tolerance; each command documents its default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Work budget; each command documents its default.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Half-width of the affine search box around the origin.
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    /// Seeds per axis of the multistart (density^2 seeds).
    #[arg(long, default_value_t = 32)]
    pub density: usize,
    /// Random lines used for the tangency degree check.
    #[arg(long, default_value_t = 5)]
    pub lines: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HolonomyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Loop/disk specification JSON.
    #[arg(long)]
    #[serde(skip)]
    pub loops: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub disk_radius: f64,
    /// Longest word searched for fixed points.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    /// Order of the Taylor surrogates used for the atlas and the probe.
    #[arg(long, default_value_t = 12)]
    pub surrogate_order: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrackArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest word length of the ball enumeration.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Depth of the derived series.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Generators kept per derived-series level.
    #[arg(long, default_value_t = 64)]
    pub cap: usize,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable files or unwritable output (exit 1).
    Io(String),
    /// Malformed or invalid input document (exit 2).
    Input(String),
    /// Solver diagnostics above thresholds (exit 3).
    Solver(String),
    /// Initial fixed point failed verification (exit 4).
    Unverified(String),
    /// Enumeration budget exceeded; partial results were written (exit 5).
    Budget(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Unverified(_) => 4,
            CliError::Budget(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(m) => write!(f, "solver diagnostics: {m}"),
            CliError::Unverified(m) => write!(f, "unverified fixed point: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub(crate) fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Config hashed into the header: command options plus the SHA-256 of each
/// input document, so renaming an input does not change the hash.
#[derive(Serialize)]
pub(crate) struct HashedConfig<'a, A: Serialize> {
    pub command: &'a str,
    pub inputs: Vec<String>,
    pub args: &'a A,
}

pub(crate) fn header<A: Serialize>(
    command: &str,
    inputs: &[&str],
    args: &A,
    seed: u64,
    settings: Vec<(&str, String)>,
) -> report::Header {
    let cfg = HashedConfig {
        command,
        inputs: inputs.iter().map(|s| report::sha256_hex(s.as_bytes())).collect(),
        args,
    };
    report::Header::new(
        command,
        &cfg,
        seed,
        settings.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    )
}

/// Runs one command on a pool of `--threads` workers and returns the
/// files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let threads = match &cli.command {
        Command::Analyze(a) => a.common.threads,
        Command::Holonomy(a) => a.common.threads,
        Command::Track(a) => a.common.threads,
        Command::Growth(a) => a.common.threads,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Analyze(a) => analyze::run(&a),
        Command::Holonomy(a) => holonomy::run(&a),
        Command::Track(a) => track::run(&a),
        Command::Growth(a) => growth::run(&a),
    })
}
