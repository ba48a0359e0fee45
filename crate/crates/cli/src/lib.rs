//! Command-line surface for the `hsframe` toolkit.
//!
//! Every subcommand produces a [`Report`] printed as JSON on standard output.
//! Exit codes: `0` success or acceptance, `2` a valid run with a negative
//! answer (certificate rejected, cross-check failed, hypothesis violated),
//! `1` an operational error.

pub mod commands;
pub mod report;
pub mod specs;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{Report, Status};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "hsframe",
    version,
    about = "Hilbert-Schmidt frame bounds, weavings and stability certificates"
)]
pub struct Cli {
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Tolerances {
    /// Tolerance for classifying a frame as Parseval.
    #[arg(long, global = true, default_value_t = hsframe::frame::DEFAULT_PARSEVAL_TOL)]
    pub tol_parseval: f64,
    /// Eigenvalues below this are treated as zero.
    #[arg(long, global = true, default_value_t = hsframe::frame::DEFAULT_PSD_TOL)]
    pub tol_psd: f64,
    /// Slack allowed when comparing measured and predicted bounds.
    #[arg(long, global = true, default_value_t = hsframe::certificates::DEFAULT_SOUND_TOL)]
    pub tol_sound: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal bounds, classification and condition number of a frame file.
    Analyze { file: String },
    /// Run a stability certificate on a pair of frame files.
    Certify {
        /// finite | quadratic | relative | decay | parseval
        theorem: String,
        /// Perturbed frame file (F).
        f: String,
        /// Reference frame file (G).
        g: String,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Build one weaving of two frames.
    Weave {
        /// Perturbed frame file (F).
        f: String,
        /// Reference frame file (G).
        g: String,
        /// One-based indices taken from F, comma-separated (may be empty).
        #[arg(long, default_value = "")]
        sigma: String,
        /// Write the woven frame to this file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Enumerate (or sample) weavings and report per-weaving bounds.
    Brute {
        /// Perturbed frame file (F).
        f: String,
        /// Reference frame file (G).
        g: String,
        /// Refuse to enumerate frames longer than this.
        #[arg(long, default_value_t = hsframe::weaving::DEFAULT_MAX_SIZE)]
        max_size: usize,
        /// Only weavings with |σ| ≤ N.
        #[arg(long)]
        restrict_n: Option<usize>,
        /// Spread the sweep over all cores.
        #[arg(long)]
        parallel: bool,
        /// Evaluate K random weavings instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the sweep as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Cross-check the sweep against this certificate.
        #[arg(long)]
        check: Option<String>,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Reconstruct one of the worked examples and compare headline values.
    PaperExample {
        name: ExampleName,
        /// Truncation M (defaults: 4 finite, 12 decay, 6 parseval).
        #[arg(long)]
        truncation: Option<usize>,
        /// Polynomial decay exponent for decay-poly.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Exponential decay rate for decay-exp.
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a seeded random frame file.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_h: usize,
        #[arg(long, default_value_t = 2)]
        dim_k: usize,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, value_enum, default_value_t = GenModeArg::Frame)]
        mode: GenModeArg,
        /// Base frame for --mode perturb.
        #[arg(long)]
        base: Option<String>,
        /// Perturbation size for --mode perturb.
        #[arg(long)]
        eps: Option<f64>,
        /// constant | poly:p=P | exp:c=C
        #[arg(long, default_value = "constant")]
        profile: String,
        /// Write the frame here; without it the frame goes to standard output.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CertArgs {
    /// Maximum number of indices taken from F (finite, quadratic).
    #[arg(long)]
    pub n: Option<usize>,
    /// Perturbation size, or `auto` to measure it.
    #[arg(long, default_value = "auto")]
    pub eps: String,
    /// Decay weights: poly:p=P | exp:c=C | w1,w2,...
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Finite,
    DecayPoly,
    DecayExp,
    Parseval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenModeArg {
    Bessel,
    Frame,
    Parseval,
    Perturb,
}

/// What the process should print and return.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

/// Intermediate result of a command before it is wrapped in a [`Report`].
pub struct Done {
    pub status: Status,
    pub seed: Option<u64>,
    pub result: serde_json::Value,
    /// Replaces the JSON report on standard output (CSV, raw frame text).
    pub raw_stdout: Option<String>,
    /// A one-line summary for standard error (e.g. a cross-check verdict).
    pub notice: Option<String>,
}

/// Parses `argv` (including the program name) and runs the command.
/// `env_seed` is the value of `HSFRAME_SEED`, which overrides `--seed`.
pub fn run<I, T>(argv: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome {
                stdout,
                stderr,
                exit_code: code,
            };
        }
    };
    let args: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let name = command_name(&cli.command).to_string();

    let start = Instant::now();
    match commands::execute(&cli, env_seed) {
        Ok(done) => {
            let report = Report {
                command: name,
                args,
                seed: done.seed,
                version: VERSION,
                status: done.status,
                wall_time_s: start.elapsed().as_secs_f64(),
                result: done.result,
            };
            let stdout = match done.raw_stdout {
                Some(raw) => raw,
                None => report.to_json() + "\n",
            };
            Outcome {
                stdout,
                stderr: done.notice.map(|n| n + "\n").unwrap_or_default(),
                exit_code: report.status.exit_code(),
            }
        }
        Err(e) => {
            let code = match e.downcast_ref::<hsframe::HsError>() {
                Some(hsframe::HsError::Hypothesis(_)) => 2,
                _ => 1,
            };
            Outcome {
                stdout: String::new(),
                stderr: format!("error: {e:#}\n"),
                exit_code: code,
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze { .. } => "analyze",
        Command::Certify { .. } => "certify",
        Command::Weave { .. } => "weave",
        Command::Brute { .. } => "brute",
        Command::PaperExample { .. } => "paper-example",
        Command::Gen { .. } => "gen",
    }
}
