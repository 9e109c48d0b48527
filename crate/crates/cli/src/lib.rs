//! Batch front end for `densework-core`.
//!
//! Every subcommand produces one CSV (or operator) document, written to
//! `--out` or to standard output, plus a one-line summary. Output depends
//! only on the arguments. Exit status: 0 on success, 1 on runtime errors,
//! 2 on usage errors, 3 when a checked invariant fails.

pub mod commands;
pub mod formats;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A finished command: the document, its summary and any invariant failures.
#[derive(Debug, Default)]
pub struct Report {
    pub document: String,
    pub summary: String,
    pub violations: Vec<String>,
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "densework", version, about = "Asymptotic density and generic computability workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact prefix densities of a set at sample points.
    Density(DensityArgs),
    /// Build a computable set with a prescribed limit density.
    #[command(name = "build-delta02")]
    BuildDelta02(Delta02Args),
    /// Run a staged construction and write its trace.
    Run(RunArgs),
    /// Decode A(n) from a coarse description of R(A).
    #[command(name = "decode-coarse")]
    DecodeCoarse(DecodeCoarseArgs),
    /// Enumeration operators.
    #[command(subcommand)]
    Eop(EopCommand),
    /// List R(A) below a bound, as members or as a total listing.
    #[command(name = "encode-r")]
    EncodeR(EncodeRArgs),
    /// Decode A(n) from a generic listing of R(A).
    #[command(name = "decode-r")]
    DecodeR(DecodeRArgs),
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    /// empty | all | evens | odds | squares | R:k | code:a,b,.. | elements:a,b,.. | file:PATH
    #[arg(long)]
    pub set: String,
    /// Comma separated, strictly increasing.
    #[arg(long)]
    pub points: String,
    /// Samples feeding the upper/lower estimates: last-half | all | last:K
    #[arg(long, default_value = "last-half")]
    pub window: String,
    /// Also report the symmetric difference density against this set.
    #[arg(long)]
    pub against: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Delta02Args {
    /// const:p/q | trunc:p/q | third
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub steps: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Settings as key=value, e.g. construction=simple; same keys as the config file.
    #[arg(value_name = "KEY=VALUE")]
    pub settings: Vec<String>,
    /// File of key=value lines; flags and positional settings win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub construction: Option<String>,
    #[arg(long)]
    pub stages: Option<u64>,
    #[arg(long)]
    pub machines: Option<u64>,
    /// Replace machine e by a program file: e:PATH. Repeatable.
    #[arg(long = "adversary", value_name = "E:PATH")]
    pub adversaries: Vec<String>,
    /// Prefix bound for the summary density.
    #[arg(long)]
    pub bound: Option<u64>,
    /// Last interval for construction=interval.
    #[arg(long)]
    pub intervals: Option<u32>,
    /// Fuel factor for construction=interval: interval j gets fuel·2^j steps.
    #[arg(long)]
    pub fuel: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeCoarseArgs {
    /// Coarse description C given directly as a set.
    #[arg(long, conflicts_with_all = ["target", "early"])]
    pub set: Option<String>,
    /// Final value of a limit approximation, as a comma list.
    #[arg(long)]
    pub target: Option<String>,
    /// Value of the approximation before it stabilizes.
    #[arg(long, default_value = "")]
    pub early: String,
    #[arg(long, default_value_t = 100)]
    pub stable_at: u64,
    /// Prefix length s used by the decoder.
    #[arg(long)]
    pub stage: u64,
    /// Decode n = 0 .. n_max-1.
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum EopCommand {
    /// Apply an operator file to a finite input set.
    Apply {
        #[arg(long)]
        operator: PathBuf,
        /// Comma list.
        #[arg(long, default_value = "")]
        input: String,
        /// Widest accepted canonical index, in bits.
        #[arg(long, default_value_t = densework_core::eop::DEFAULT_INDEX_WIDTH)]
        max_width: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compose two operator files: outer ∘ inner.
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        inner: PathBuf,
        /// Maximum number of generated axioms.
        #[arg(long, default_value_t = 1 << 16)]
        bound: usize,
        #[arg(long, default_value_t = densework_core::eop::DEFAULT_INDEX_WIDTH)]
        max_width: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct EncodeRArgs {
    /// The set A of slice indices, same grammar as `density --set`.
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub bound: u64,
    /// members | listing
    #[arg(long, default_value = "members")]
    pub format: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeRArgs {
    /// File of m,b rows.
    #[arg(long, conflicts_with = "set")]
    pub listing: Option<PathBuf>,
    /// Decode from the full listing of R(A) for this A.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub n_max: u32,
    /// Pairs consumed at most.
    #[arg(long, default_value_t = densework_core::partition::DEFAULT_DECODE_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn execute(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Density(a) => commands::density(a),
        Command::BuildDelta02(a) => commands::build_delta02(a),
        Command::Run(a) => commands::run(a),
        Command::DecodeCoarse(a) => commands::decode_coarse(a),
        Command::Eop(c) => commands::eop(c),
        Command::EncodeR(a) => commands::encode_r(a),
        Command::DecodeR(a) => commands::decode_r(a),
    }
}
