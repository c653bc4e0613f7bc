//! Command-line front end: argument parsing, JSON config files, dispatch.
//!
//! Every command accepts `--config FILE`, a JSON object whose keys are the
//! long flag names (`"n"`, `"mu"`, `"n-list"`, ...). Flags given on the command
//! line take precedence over the file. Exit codes: 0 when all checks pass,
//! 1 when a check fails, 2 on usage errors.

mod commands;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::output::Format;

/// Environment variable holding the worker thread count for Monte Carlo runs.
pub const THREADS_ENV: &str = "SSGA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ssga", version, about = "Selection-free steady-state GA: symmetry checks, exact oracles and Monte Carlo hitting times")]
pub struct Cli {
    /// Output format: csv or json (default depends on the command)
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write output to PATH instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON file with default values for flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Target orbit under the stabilizer generators versus the Hamming shell
    Orbit(OrbitArgs),
    /// Upper bound 2t/C(n,n/2) on Pr[T <= t]
    Bound(BoundArgs),
    /// Monte Carlo hitting times
    Simulate(SimulateArgs),
    /// Exact Markov-chain computations on tiny instances
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Verification runs
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exact offspring probabilities over the target orbit
    Equidist(OracleEquidistArgs),
    /// Exact Pr[T <= t] against the bound
    Bound(OracleBoundArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Exact crossover/automorphism commutation on random samples
    Lemma3(Lemma3Args),
    /// Chi-square test of offspring equidistribution over the target orbit
    Equidist(EquidistArgs),
    /// Chi-square test of x_1 under random initialization
    Uniformity(UniformityArgs),
    /// Full verification suite
    All(AllArgs),
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Also list the orbit members
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Last iteration to report
    #[arg(long)]
    pub tmax: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Population size
    #[arg(long)]
    pub mu: Option<usize>,
    /// canonical or random
    #[arg(long)]
    pub init: Option<String>,
    /// Number of independent trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// Iteration budget per trial [default: 16*C(n,n/2)]
    #[arg(long)]
    pub tmax: Option<u64>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Target string [default: all ones]
    #[arg(long)]
    pub target: Option<String>,
    /// Iterations at which to report Pr[T <= t]
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

#[derive(Debug, Args)]
pub struct OracleEquidistArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Population size
    #[arg(long)]
    pub mu: Option<usize>,
    /// Last iteration to report
    #[arg(long)]
    pub t: Option<u64>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

#[derive(Debug, Args)]
pub struct OracleBoundArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Population size
    #[arg(long)]
    pub mu: Option<usize>,
    /// Last iteration to report
    #[arg(long)]
    pub tmax: Option<u64>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

#[derive(Debug, Args)]
pub struct Lemma3Args {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of random parent pairs
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random automorphisms per parent pair
    #[arg(long)]
    pub automorphisms: Option<usize>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

#[derive(Debug, Args)]
pub struct EquidistArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Population size
    #[arg(long)]
    pub mu: Option<usize>,
    /// Iteration whose first offspring is counted
    #[arg(long)]
    pub t: Option<u64>,
    /// Offspring in the orbit to collect
    #[arg(long)]
    pub hits: Option<u64>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

#[derive(Debug, Args)]
pub struct UniformityArgs {
    /// String length (even)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of independent trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

#[derive(Debug, Args)]
pub struct AllArgs {
    /// String lengths for the orbit and crossover checks
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Population sizes for the Monte Carlo checks
    #[arg(long, value_delimiter = ',')]
    pub mu_list: Option<Vec<usize>>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials for the hitting-time checks
    #[arg(long)]
    pub trials: Option<u64>,
    /// Trials for the random-initialization uniformity check
    #[arg(long)]
    pub uniformity_trials: Option<u64>,
    /// Orbit hits collected per equidistribution check
    #[arg(long)]
    pub hits: Option<u64>,
    /// Fixture: probability of (1,0) at differing positions, a dyadic like 3/4
    #[arg(long)]
    pub coin_bias: Option<String>,
}

/// Failure to run a command at all.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ssga_core::Error> for CliError {
    fn from(e: ssga_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Flag values merged with the optional config file.
pub(crate) struct Settings {
    file: Map<String, Value>,
}

impl Settings {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self { file: Map::new() });
        };
        let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(map)) => Ok(Self {
                file: map
                    .into_iter()
                    .map(|(k, v)| (k.replace('_', "-"), v))
                    .collect(),
            }),
            Ok(_) => Err(CliError::Usage(format!("{}: config must be a JSON object", path.display()))),
            Err(e) => Err(CliError::Usage(format!("{}: {e}", path.display()))),
        }
    }

    pub(crate) fn opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key:?}: {e}"))),
        }
    }

    pub(crate) fn or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub(crate) fn req<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.opt(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required --{key}")))
    }
}

/// Rendered output of a successful invocation.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
    pub output: Option<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let settings = Settings::load(cli.config.as_ref())?;
    let format = settings
        .opt(cli.format.clone(), "format")?
        .map(|f: String| f.parse::<Format>().map_err(CliError::Usage))
        .transpose()?;
    let output = settings.opt(cli.output.clone(), "output")?;
    let (report, default_format) = commands::dispatch(&cli.command, &settings)?;
    let text = report.render(format.unwrap_or(default_format));
    Ok(Outcome {
        text,
        passed: report.passed,
        output,
    })
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    if let Some(threads) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool can only be installed once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let args: Vec<T> = args.into_iter().collect();
    let outcome = match execute(args.clone()) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            // clap renders help and version requests as errors too
            match Cli::try_parse_from(args) {
                Err(e) if !e.use_stderr() => {
                    print!("{e}");
                    return 0;
                }
                _ => eprintln!("{msg}"),
            }
            return 2;
        }
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let written = match &outcome.output {
        Some(path) => std::fs::write(path, &outcome.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("i/o error: {e}");
        return 2;
    }
    outcome.exit_code()
}
