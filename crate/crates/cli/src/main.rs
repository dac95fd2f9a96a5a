//! `rcl`: command-line driver for the colouring pipeline.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::OutTarget;

pub const EXIT_PRECONDITION: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "rcl", version, about = "Explicit Euclidean Ramsey colourings and their checks")]
struct Cli {
    /// Worker threads (default: available parallelism). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall time in the report manifest.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct LineArgs {
    /// Linear coefficient of y_j = j^2 + beta j + gamma (rational or decimal).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub gamma: String,
    /// Number of points j = 1..=m.
    #[arg(long, default_value_t = 1000)]
    pub m: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide sphericity of a configuration and print its certificate.
    Certify(CertifyArgs),
    /// Build the colouring spec for a non-spherical configuration.
    #[command(name = "build-spec")]
    BuildSpec(BuildSpecArgs),
    /// Colour a squared norm or a point.
    #[command(alias = "color")]
    Colour(ColourArgs),
    /// Sample norm tuples on the copy equation and look for all-red ones.
    Redcheck(RedcheckArgs),
    /// First red point along one line.
    #[command(name = "scan-line")]
    ScanLine(ScanLineArgs),
    /// Empirical m over a grid and random sample of lines.
    #[command(name = "search-m")]
    SearchM(SearchMArgs),
    /// Discrepancy of a line's torus sequence.
    Discrepancy(DiscrepancyArgs),
    /// Erdős–Turán–Koksma bound of a line's torus sequence.
    Etk(EtkArgs),
    /// One Weyl sum of a line's torus sequence.
    Weyl(WeylArgs),
    /// Check that a certified small discrepancy comes with a red hit.
    #[command(name = "lemma1-check")]
    Lemma1Check(Lemma1Args),
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BuildSpecArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ColourArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Squared norm, e.g. "5/2" or "13*sqrt(2)/4".
    #[arg(long, conflicts_with = "point", required_unless_present = "point", allow_hyphen_values = true)]
    pub norm: Option<String>,
    /// Point coordinates, e.g. "(1, 2, 0)".
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct RedcheckArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub numerator_bits: u32,
    #[arg(long, default_value_t = 8)]
    pub denominator_bits: u32,
    /// Scan even if the spec fails validation (for negative testing).
    #[arg(long)]
    pub allow_invalid_spec: bool,
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    pub out: OutTarget,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanLineArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub line: LineArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchMArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Exact grid size as BETAxGAMMA.
    #[arg(long, default_value = "100x100")]
    pub grid: String,
    /// Random double-precision lines.
    #[arg(long, default_value_t = 1000)]
    pub random: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = rcl_core::lineseq::DEFAULT_M_CAP)]
    pub m_cap: u64,
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    pub out: OutTarget,
}

#[derive(Args, Debug, Serialize)]
pub struct DiscrepancyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub line: LineArgs,
    /// Require the exact algorithm.
    #[arg(long, conflicts_with = "effort")]
    pub exact: bool,
    /// Grid-bracket effort (default: exact when in range, else 4).
    #[arg(long)]
    pub effort: Option<u32>,
    /// Also evaluate the ETK bound with this cutoff.
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long = "C-r", default_value = "default")]
    pub c_r: String,
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    pub out: OutTarget,
}

#[derive(Args, Debug, Serialize)]
pub struct EtkArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub line: LineArgs,
    #[arg(long = "N", default_value_t = 10)]
    pub n: u32,
    /// Constant C_r, or "default" for (3/2)^r.
    #[arg(long = "C-r", default_value = "default")]
    pub c_r: String,
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    pub out: OutTarget,
}

#[derive(Args, Debug, Serialize)]
pub struct WeylArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub line: LineArgs,
    /// Frequency vector, comma separated, e.g. "3" or "1,-2".
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    pub out: OutTarget,
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma1Args {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub line: LineArgs,
    /// ETK cutoff (default: floor(2 C_r p^r) + 1).
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long = "C-r", default_value = "default")]
    pub c_r: String,
    /// Double m from --m-start up to --m until the Weyl tail certifies a hit.
    #[arg(long)]
    pub recipe: bool,
    #[arg(long, default_value_t = 1000)]
    pub m_start: u64,
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    pub out: OutTarget,
}

/// A property check failed; exit code 2.
#[derive(Debug)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "property violation: {}", self.0)
    }
}

impl std::error::Error for Violation {}

/// Bad argument values that clap cannot check; exit code 64.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage: {}", self.0)
    }
}

impl std::error::Error for Usage {}

pub struct Context {
    pub timing: bool,
    pub start: Instant,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = Context {
        timing: cli.timing,
        start: Instant::now(),
    };
    match &cli.command {
        Command::Certify(a) => commands::certify(&ctx, a),
        Command::BuildSpec(a) => commands::build_spec(a),
        Command::Colour(a) => commands::colour(&ctx, a),
        Command::Redcheck(a) => commands::redcheck(&ctx, a),
        Command::ScanLine(a) => commands::scan_line(&ctx, a),
        Command::SearchM(a) => commands::search_m(&ctx, a),
        Command::Discrepancy(a) => commands::discrepancy(&ctx, a),
        Command::Etk(a) => commands::etk(&ctx, a),
        Command::Weyl(a) => commands::weyl(&ctx, a),
        Command::Lemma1Check(a) => commands::lemma1_check(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    rcl_core::precision::init_from_env();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Violation>().is_some() {
                ExitCode::from(EXIT_VIOLATION)
            } else if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_PRECONDITION)
            }
        }
    }
}
