//! `slidematch`: generate, replay, evaluate and audit edge streams.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "slidematch",
    version,
    about = "Sliding-window maximum-weight matching harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a stream file (or a directory of them) from a generator.
    Gen(GenArgs),
    /// Replay a stream through the window engine and emit one CSV row per event.
    Run(RunConfig),
    /// Like `run`, plus the exact optimum and ratio of every window.
    Eval(EvalArgs),
    /// Check the two-output smoothness guarantee on every cut of a small stream.
    Audit(AuditArgs),
    /// Check the lookahead hard instance against its expected aggregates.
    VerifyHard(VerifyHardArgs),
}

/// Where the stream comes from: a file or one of the generators.
#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Stream file to read.
    #[arg(long, short, conflicts_with_all = ["hard", "random"])]
    pub input: Option<PathBuf>,
    /// Use the labelled hard instance.
    #[arg(long)]
    pub hard: bool,
    /// Use a seeded random stream.
    #[arg(long, conflicts_with = "hard")]
    pub random: bool,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub wmin: u64,
    #[arg(long, default_value_t = 100)]
    pub wmax: u64,
    /// Uniform weights are multiples of 1/denom.
    #[arg(long, default_value_t = 1)]
    pub denom: u64,
    /// Draw power-law weights over this many doubling scales instead.
    #[arg(long)]
    pub power_law: Option<u32>,
    /// Probability that an event repeats an earlier endpoint pair.
    #[arg(long, default_value_t = 0.0)]
    pub dup_rate: f64,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Write a named suite (`adversarial`) into --out-dir.
    #[arg(long, conflicts_with_all = ["hard", "random", "input"])]
    pub suite: Option<String>,
    /// Rational epsilon, e.g. 1/10.
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    /// Output file (stdout when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Options shared by `run` and `eval`.
#[derive(Args, Debug)]
pub struct RunConfig {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Window length L.
    #[arg(long, short = 'L')]
    pub window: usize,
    /// Rational epsilon, e.g. 1/10.
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    /// Rational beta; defaults to epsilon/9.
    #[arg(long)]
    pub beta: Option<String>,
    /// Report from the second bucket whenever the oldest is not exactly L long,
    /// warm-up included.
    #[arg(long)]
    pub strict_paper: bool,
    /// CSV output file (stdout when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Render numbers with this many decimals instead of exact p/q.
    #[arg(long)]
    pub decimal: Option<usize>,
    /// Also write a per-event trace of one full-stream run.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 24)]
    pub oracle_max_edges: usize,
    #[arg(long, default_value_t = 20)]
    pub oracle_max_vertices: usize,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    #[arg(long)]
    pub beta: Option<String>,
    /// Use the matching weight as both outputs instead of W' and the matching.
    #[arg(long)]
    pub standard: bool,
    /// Factor checked in --standard mode.
    #[arg(long, default_value = "7/2")]
    pub alpha: String,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Args, Debug)]
pub struct VerifyHardArgs {
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    /// Verify a labelled stream file instead of the generated instance.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub decimal: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CliError::PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => commands::gen(&args),
        Command::Run(args) => commands::run(&args),
        Command::Eval(args) => commands::eval(&args),
        Command::Audit(args) => commands::audit(&args),
        Command::VerifyHard(args) => commands::verify_hard(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
