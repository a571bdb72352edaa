//! Command-line front end for `qpg-core` experiments.
//!
//! Every command writes plain CSV. Files start with `# ` comment lines holding
//! the resolved configuration, so a rerun with the same inputs reproduces them
//! byte for byte.

pub mod commands;
pub mod config;
#[cfg(test)]
mod tests;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ConfigError, ExperimentConfig, PostFnSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qpg", version, about = "Quantum policy-gradient experiments")]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config's seed list with this single seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one policy per seed and write learning curves.
    Train,
    /// Exact globality of a post-processing function.
    Globality {
        /// global, msb, parity:<q> or table:<path>
        #[arg(long)]
        postfn: String,
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        actions: Option<usize>,
        /// Print the per-bitstring extracted information (n <= 8).
        #[arg(long)]
        ei: bool,
    },
    /// Globality histogram over balanced partitionings.
    Enum {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        actions: usize,
        /// Sample random partitionings instead of enumerating (default count 100000).
        #[arg(long, num_args = 0..=1, default_missing_value = "100000")]
        sample: Option<usize>,
    },
    /// Empirical Fisher information and its spectrum.
    Fim,
    /// Effective dimension over the configured data sizes.
    Effdim,
    /// Accuracy bound for softmax policies with one shared observable.
    Bound {
        /// Print the bound for this many actions.
        #[arg(long)]
        actions: Option<usize>,
    },
    /// Decode one bitstring.
    Decode {
        #[arg(long)]
        postfn: String,
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        actions: Option<usize>,
        /// Bitstring, qubit n-1 first.
        bits: String,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<qpg_core::Error> for CliError {
    fn from(e: qpg_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Runs a parsed command line, writing the human-readable summary to `out`.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => {
            let mut c = ExperimentConfig::load(path)?;
            if let Some(seed) = cli.seed {
                c.seeds = vec![seed];
            }
            Some(c)
        }
        None => None,
    };
    let needs_config = || {
        config
            .as_ref()
            .ok_or_else(|| CliError::Config(ConfigError::new("--config", "this command needs a config file")))
    };
    let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let seed = cli.seed.or(config.as_ref().map(|c| c.seeds[0])).unwrap_or(0);
    match &cli.command {
        Command::Train => commands::train(needs_config()?, &out_dir, out),
        Command::Globality {
            postfn,
            qubits,
            actions,
            ei,
        } => commands::globality(postfn, *qubits, *actions, *ei, cli.out_dir.as_deref(), out),
        Command::Enum { qubits, actions, sample } => commands::enumerate(*qubits, *actions, *sample, seed, &out_dir, out),
        Command::Fim => commands::fim(needs_config()?, &out_dir, out),
        Command::Effdim => commands::effdim(needs_config()?, &out_dir, out),
        Command::Bound { actions } => match (config.as_ref(), actions) {
            (Some(c), _) => commands::bound_experiment(c, *actions, &out_dir, out),
            (None, Some(m)) => commands::bound(*m, out),
            (None, None) => Err(ConfigError::new("--actions", "give --actions or --config").into()),
        },
        Command::Decode {
            postfn,
            qubits,
            actions,
            bits,
        } => commands::decode(postfn, *qubits, *actions, bits, out),
    }
}

/// Parses `args` and runs them; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            let _ = writeln!(err, "config error: --jobs must be positive");
            return EXIT_CONFIG;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
