//! The `hv2q` command line.
//!
//! Exit codes are a stable contract: 0 when every check passes, 1 when a
//! check fails, 2 for unusable input (bad flags, malformed JSON, unreadable
//! files, an empty sweep range).

mod commands;
pub mod input;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::hidden::DEFAULT_CHUNK;
use crate::verify::ModelKind;

pub use commands::{Outcome, THREADS_ENV};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hv2q",
    version,
    about = "Hidden-variable models for two-qubit pure states, checked against quantum mechanics",
    after_help = "Set HV2Q_THREADS to cap the number of Monte Carlo worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare one model with the quantum prediction for (ψ, X, Y).
    Verify(VerifyArgs),
    /// Repeat the comparison over a grid of one parameter, one CSV row per point.
    Sweep(SweepArgs),
    /// Evolve the state under a Hamiltonian and check the model at each step.
    Evolve(EvolveArgs),
    /// Contextuality demonstrations.
    Contextuality(ContextualityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Bell,
    General,
    Minimal,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Bell => ModelKind::Bell,
            ModelArg::General => ModelKind::General,
            ModelArg::Minimal => ModelKind::Minimal,
        }
    }
}

/// Flags shared by every command that samples the hidden variable.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Monte Carlo draws (0 skips sampling; otherwise at least 10000).
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draws per RNG stream; together with the seed it fixes the result.
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    pub chunk: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// `singlet`, inline JSON {"amplitudes": [[re,im] x4]} or a JSON file.
    #[arg(long)]
    pub state: String,
    /// `sx`, `sy`, `sz`, `id`, inline JSON {"alpha1","alpha2","axis"} or a JSON file.
    #[arg(long = "obs-x")]
    pub obs_x: String,
    #[arg(long = "obs-y")]
    pub obs_y: String,
    #[arg(long, value_enum, default_value_t = ModelArg::General)]
    pub model: ModelArg,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Monte Carlo estimates pass within this many standard errors.
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
    /// Extra random partner axes for the locality probe (Y's axis is always included).
    #[arg(long = "probe-partners", default_value_t = 32)]
    pub probe_partners: usize,
    /// Record wall-clock time (the report is then no longer byte-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Angle between the axes of X and Y.
    Theta,
    /// Entanglement angle of the Schmidt-form state, in [0, π/4].
    Phi,
    /// Evolution time under --hamiltonian.
    T,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    /// Grid points, endpoints included.
    #[arg(long)]
    pub points: usize,
    /// Ignored for phi sweeps, which use the Schmidt form.
    #[arg(long, default_value = "singlet")]
    pub state: String,
    #[arg(long = "obs-x", default_value = "sz")]
    pub obs_x: String,
    #[arg(long = "obs-y", default_value = "sz")]
    pub obs_y: String,
    /// Required for t sweeps.
    #[arg(long)]
    pub hamiltonian: Option<String>,
    #[arg(long, value_enum, default_value_t = ModelArg::General)]
    pub model: ModelArg,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub state: String,
    /// `zero`, inline JSON [[[re,im] x4] x4] or a JSON file.
    #[arg(long)]
    pub hamiltonian: String,
    #[arg(long = "t-max")]
    pub t_max: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long = "obs-x", default_value = "sz")]
    pub obs_x: String,
    #[arg(long = "obs-y", default_value = "sz")]
    pub obs_y: String,
    #[arg(long, value_enum, default_value_t = ModelArg::General)]
    pub model: ModelArg,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Nine-operator square: matrix products, exhaustive sign search, model values.
    Peres,
    /// Measure of λ where X's joint-context value differs from its value alone.
    ProductRule,
}

#[derive(Debug, Clone, Args)]
pub struct ContextualityArgs {
    #[arg(value_enum)]
    pub demo: Demo,
    #[arg(long, default_value = "singlet")]
    pub state: String,
    #[arg(long = "obs-x", default_value = "sz")]
    pub obs_x: String,
    /// Defaults to the axis at 60° from z in the xz-plane.
    #[arg(long = "obs-y")]
    pub obs_y: Option<String>,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::NotUnit { .. }
        | Error::NotHermitian { .. }
        | Error::Json(_)
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match commands::execute(&cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.text, outcome.out.as_ref()) {
                eprintln!("error: cannot write report: {e}");
                return EXIT_USAGE;
            }
            eprintln!("{}", outcome.summary);
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
