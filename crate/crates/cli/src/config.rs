//! Command-line grammar and the resolved run configuration embedded in reports.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::tokens::TokenMode;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_TOL: f64 = 1e-7;

const BOUNDS_HELP: &str = "\
Evaluates closed-form redundancy bounds over a grid of (alpha, c, k, n).

Rows are ordered by alpha, then c, then k, then n, then claim. Claims:
  worst_case_zipf      log2 Shtarkov lower bound for the Zipf permutation class
  distinct_upper       upper bound at d = expected distinct count of zipf(alpha,k)
  distinct_lower       lower bound at the same d (asymptotic; may be negative)
  envelope_distinct    bound on the distinct count under the envelope c i^-alpha
  zipf_envelope_upper  upper bound for the unordered envelope class
  zipf_envelope_lower  lower bound for the unordered envelope class

CSV columns: alpha,c,k,n,claim,status,value,normalized,note,anchor
  status      ok | infeasible
  value       bound in bits (distinct count for envelope_distinct); empty if infeasible
  normalized  value / (n^(1/alpha) log2 k); empty if undefined
  note        reason for infeasibility, or evaluator remarks";

const VERIFY_HELP: &str = "\
Runs invariant suites and reports every check with its measured and bound values.

Exit status is 0 when all checks pass and 1 otherwise.

CSV columns: suite,claim,instance,measured,relation,bound,slack,passed,anchor";

#[derive(Debug, Parser)]
#[command(
    name = "uec",
    version,
    about = "Universal enumerative codec and redundancy laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a token stream into a UEC1 file.
    Encode(EncodeArgs),
    /// Decode a UEC1 file back into a token stream.
    Decode(DecodeArgs),
    /// Tabulate closed-form bounds over a parameter grid.
    #[command(long_about = BOUNDS_HELP)]
    Bounds(CommonArgs),
    /// Compute the exact Shtarkov sum of a class.
    Shtarkov(ShtarkovArgs),
    /// Compute achieved and minimax expected redundancy for a class.
    Redundancy(RedundancyArgs),
    /// Run verification suites.
    #[command(long_about = VERIFY_HELP)]
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Class description file (JSON with a "kind" of zipf, envelope, permutation or explicit).
    #[arg(long)]
    pub class: Option<PathBuf>,
    /// Sequence length; comma-separated list for grids.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Alphabet size; comma-separated list for grids.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Power-law exponent; comma-separated list for grids.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Envelope scale; comma-separated list for grids.
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<f64>,
    /// Random seed, decimal or 0x-prefixed hexadecimal.
    #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
    pub seed: u64,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Convergence tolerance of the minimax oracle, in bits.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    /// Newline-delimited alphabet; the symbol on line i has rank i.
    #[arg(long)]
    pub alphabet: PathBuf,
    /// Token file to encode.
    #[arg(long)]
    pub input: PathBuf,
    /// UEC1 file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = TokenMode::Words)]
    pub tokens: TokenMode,
    /// Block length; the whole stream forms one block when absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected alphabet size, checked against the alphabet file.
    #[arg(long)]
    pub k: Option<usize>,
    /// Where to write the JSON report; standard output when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub alphabet: PathBuf,
    /// UEC1 file to decode.
    #[arg(long)]
    pub input: PathBuf,
    /// Token file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = TokenMode::Words)]
    pub tokens: TokenMode,
    /// Expected block length; every block but the last must have it.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Grouped,
    Exhaustive,
}

#[derive(Debug, Clone, Args)]
pub struct ShtarkovArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Grouped)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Args)]
pub struct RedundancyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also solve the minimax problem over all relabelings of the class representative.
    #[arg(long)]
    pub minimax: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Shtarkov,
    Codec,
    Redundancy,
    Concentration,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Fully resolved configuration, embedded verbatim in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub class_file: Option<String>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub alpha: Vec<f64>,
    pub c: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub format: Format,
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<(String, String)>,
}

impl RunConfig {
    pub fn from_common(command: &str, a: &CommonArgs) -> Self {
        RunConfig {
            command: command.to_owned(),
            class_file: a.class.as_ref().map(|p| p.display().to_string()),
            n: a.n.clone(),
            k: a.k.clone(),
            alpha: a.alpha.clone(),
            c: a.c.clone(),
            seed: a.seed,
            trials: a.trials,
            tol: a.tol,
            format: a.format,
            output: a.output.as_ref().map(|p| p.display().to_string()),
            options: Vec::new(),
        }
    }

    pub fn with_option(mut self, key: &str, value: impl ToString) -> Self {
        self.options.push((key.to_owned(), value.to_string()));
        self
    }
}
