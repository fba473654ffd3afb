//! `errorfloor`: batch driver for instanton searches, FER curves and code
//! construction.

mod commands;
mod manifest;
mod sweep;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::process::ExitCode;

#[derive(Debug, Parser, Serialize)]
#[command(name = "errorfloor", version, about = "Instanton analysis and error-floor prediction for LDPC codes")]
pub struct Cli {
    /// Worker threads for parallel trials and frames (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Print size, degree profile, girth, GF(2) rank and rate.
    GraphInfo(GraphInfoArgs),
    /// Enumerate (a,b) trapping subgraphs as JSON.
    Census(CensusArgs),
    /// Run an instanton search; writes JSON lines plus a histogram CSV.
    Search(SearchArgs),
    /// Monte Carlo FER sweep as CSV.
    Fer(FerArgs),
    /// FER prediction from an instanton spectrum as CSV.
    Predict(PredictArgs),
    /// Generalized PEG construction; writes an alist and a JSON log.
    Construct(ConstructArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GraphInfoArgs {
    /// alist file, or the built-in `tanner155`.
    #[arg(long)]
    pub code: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub code: String,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Isa,
    Pcs,
    Amoeba,
    Critical,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub code: String,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Independent runs (critical: number of sampled trapping sets, 0 = all).
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// ISA: initial number of flipped bits.
    #[arg(long, default_value_t = 20)]
    pub flips: usize,
    /// PCS: standard deviation of the initial noise.
    #[arg(long, default_value_t = errorfloor::instanton_search::PCS_DEFAULT_STRENGTH)]
    pub noise_strength: f64,
    /// amoeba: bp, min-sum or lp; critical: gallager-a or gallager-b.
    #[arg(long)]
    pub decoder: Option<String>,
    /// amoeba: Eb/N0 in dB setting the soft decoder's LLR scale.
    #[arg(long, default_value_t = 4.0)]
    pub snr_db: f64,
    /// Iterative decoder iteration budget.
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,
    /// amoeba: Nelder-Mead iteration cap.
    #[arg(long, default_value_t = 2000)]
    pub amoeba_iterations: usize,
    /// critical: trapping-set class to examine.
    #[arg(long, default_value_t = 5)]
    pub a: usize,
    #[arg(long, default_value_t = 3)]
    pub b: usize,
    /// critical: largest flip-set size tried.
    #[arg(long, default_value_t = errorfloor::instanton_search::DEFAULT_SIZE_CAP)]
    pub size_cap: usize,
    /// JSON-lines output; the histogram goes to `<out>.hist.csv`.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct FerArgs {
    #[arg(long)]
    pub code: String,
    /// lp, gallager-a, gallager-b, bp or min-sum.
    #[arg(long)]
    pub decoder: String,
    #[arg(long, value_parser = ["bsc", "awgn"])]
    pub channel: String,
    /// BSC crossover sweep `lo:hi:step`, comma lists allowed.
    #[arg(long)]
    pub eps: Option<String>,
    /// AWGN Eb/N0 sweep in dB.
    #[arg(long)]
    pub snr_db: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Instanton JSON lines, or CSV with header `weight,count`.
    #[arg(long)]
    pub spectrum: String,
    /// Code supplying n (BSC) and the rate (AWGN).
    #[arg(long, default_value = "tanner155")]
    pub code: String,
    #[arg(long, value_parser = ["bsc", "awgn"])]
    pub channel: String,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub snr_db: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub dv: usize,
    #[arg(long)]
    pub m: usize,
    /// Comma list of `cycles<G` and `ts53`.
    #[arg(long, default_value = "cycles<8,ts53")]
    pub forbid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = errorfloor::code_design::DEFAULT_MAX_BACKTRACKS)]
    pub max_backtracks: usize,
    /// alist output; the log goes to `<out>.log.json`.
    #[arg(long)]
    pub out: String,
}

/// Failure classes mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Algorithm(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Algorithm(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Algorithm(m) => write!(f, "algorithm failure: {m}"),
        }
    }
}

impl From<errorfloor::Error> for CliError {
    fn from(e: errorfloor::Error) -> Self {
        if e.is_algorithmic() {
            CliError::Algorithm(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ERRORFLOOR_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.workers {
        if k == 0 {
            eprintln!("{}", CliError::Usage("--workers must be positive".into()));
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().expect("global pool initialized once");
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("errorfloor: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
