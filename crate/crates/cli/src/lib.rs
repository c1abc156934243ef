//! Command-line front end for maximum-likelihood process tomography.
//!
//! Verbs: `simulate` writes a dataset, `reconstruct` runs both estimators on
//! one, `demo` repeats the damping-channel study over seeded trials and
//! `convert` moves a channel between representations.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{read_text, Target};
pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qpt",
    version,
    about = "Maximum-likelihood quantum process tomography"
)]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate measurement counts for a channel.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reconstruct a channel from a dataset file.
    Reconstruct {
        dataset: PathBuf,
        /// Per-iteration trace CSV.
        #[arg(long)]
        trace_csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Repeat the damping-channel study and write a report directory.
    Demo {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Convert a channel, result or parameter CSV to another representation.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// damping, identity, unitary or depolarizing.
    #[arg(long)]
    pub channel: Option<String>,
    /// Channel parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..)]
    pub params: Option<Vec<f64>>,
    /// Shots per measurement setting.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Output file (the report directory for `demo`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV output: counts for `simulate`, the parameter comparison otherwise.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Convergence threshold on the largest change of any G element.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub log_every: Option<usize>,
    /// Use exact probabilities instead of sampled counts.
    #[arg(long)]
    pub exact: bool,
}

/// Config file (or defaults) with flags applied on top. The flag reports
/// whether the channel was given explicitly.
pub fn resolve(config: Option<&PathBuf>, args: &CommonArgs) -> Result<(RunConfig, bool), CliError> {
    let (mut cfg, mut explicit_channel) = match config {
        Some(path) => {
            let cfg = RunConfig::load(path)?;
            let raw: serde_json::Value = serde_json::from_str(&read_text(path)?)
                .map_err(|e| CliError::usage(e.to_string()))?;
            (cfg, raw.get("channel").is_some())
        }
        None => (RunConfig::default(), false),
    };
    if let Some(name) = &args.channel {
        cfg.channel.name = name.clone();
        cfg.channel.params = Vec::new();
        explicit_channel = true;
    }
    if let Some(params) = &args.params {
        cfg.channel.params = params.clone();
        explicit_channel = true;
    }
    if let Some(v) = args.shots {
        cfg.shots_per_setting = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = &args.out {
        cfg.outputs.out = Some(v.clone());
    }
    if let Some(v) = &args.csv {
        cfg.outputs.csv = Some(v.clone());
    }
    if let Some(v) = args.tol {
        cfg.solver.convergence_tol = v;
    }
    if let Some(v) = args.max_iters {
        cfg.solver.max_iterations = v;
    }
    if let Some(v) = args.log_every {
        cfg.solver.log_every = v;
    }
    cfg.exact |= args.exact;
    cfg.validate()?;
    Ok((cfg, explicit_channel))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli.config.as_ref();
    match &cli.command {
        Command::Simulate { common } => {
            let (cfg, _) = resolve(config, common)?;
            commands::simulate(&cfg)
        }
        Command::Reconstruct {
            dataset,
            trace_csv,
            common,
        } => {
            let (mut cfg, explicit) = resolve(config, common)?;
            let trace = trace_csv.clone().or_else(|| cfg.outputs.trace_csv.take());
            let truth = if explicit {
                Some(cfg.channel.build()?)
            } else {
                None
            };
            commands::reconstruct(&cfg, dataset, trace.as_deref(), truth.as_ref())
        }
        Command::Demo { common } => {
            let (cfg, _) = resolve(config, common)?;
            commands::demo(&cfg).map(|_| ())
        }
        Command::Convert { input, to, common } => {
            let (cfg, _) = resolve(config, common)?;
            commands::convert(input, *to, cfg.outputs.out.as_deref())
        }
    }
}
