//! Operator surface: one subcommand per pipeline stage, file artifacts in
//! between, a JSON run manifest for every invocation.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit codes: 0 success, 2 unknown variant, 3 malformed input file,
/// 1 anything else.
pub const EXIT_BAD_VARIANT: u8 = 2;
pub const EXIT_BAD_CSV: u8 = 3;

#[derive(Parser)]
#[command(name = "cropcast", version, about = "Crop-type classification pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a named preset.
    Synth {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Override the preset's parcel count.
        #[arg(long)]
        fois: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Hampel-flag and Whittaker-smooth the observation series.
    Smooth {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Worker threads for per-parcel smoothing (output is ordered, so
        /// any thread count is deterministic; 1 is the reference mode).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Windowed statistical features and neighborhood crop distributions.
    Featurize {
        #[arg(long)]
        data_dir: PathBuf,
        /// Directory holding regular.csv from the smooth stage.
        #[arg(long)]
        work_dir: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Threshold-driven label aggregation map.
    Aggregate {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train one model variant.
    Train {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        work_dir: PathBuf,
        #[arg(long)]
        variant: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Training itself is single-threaded; values > 1 are accepted and
        /// ignored with a note, so scripted runs stay deterministic.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Evaluate a trained model at one or more aggregation levels.
    Eval {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        work_dir: PathBuf,
        #[arg(long)]
        model_dir: PathBuf,
        /// all | aggregated | interest | interest-only
        #[arg(long, default_value = "all")]
        level: String,
        /// Comma-separated crop codes defining the crops of interest.
        #[arg(long)]
        interest: Option<String>,
        /// Single cutoff (10..=24) or "sweep" for the early-season curve.
        #[arg(long)]
        cutoff: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Few-shot transfer: fine-tune a source model on nested target subsets
    /// and compare against training from scratch.
    Fewshot {
        #[arg(long)]
        source_model: PathBuf,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        work_dir: PathBuf,
        #[arg(long, default_value = "4,6,8,10")]
        exponents: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth { preset, seed, fois, out_dir } => {
            commands::synth(&preset, seed, fois, out_dir)
        }
        Command::Smooth { data_dir, out_dir, config, threads } => {
            commands::smooth(&data_dir, out_dir, config.as_deref(), threads)
        }
        Command::Featurize { data_dir, work_dir, out_dir, config } => {
            commands::featurize(&data_dir, &work_dir, out_dir, config.as_deref())
        }
        Command::Aggregate { data_dir, out_dir, config } => {
            commands::aggregate(&data_dir, out_dir, config.as_deref())
        }
        Command::Train { data_dir, work_dir, variant, out_dir, config, seed, threads } => {
            commands::train(&data_dir, &work_dir, &variant, out_dir, config.as_deref(), seed, threads)
        }
        Command::Eval { data_dir, work_dir, model_dir, level, interest, cutoff, out_dir, threads } => {
            commands::eval(
                &data_dir, &work_dir, &model_dir, &level, interest.as_deref(),
                cutoff.as_deref(), out_dir, threads,
            )
        }
        Command::Fewshot { source_model, data_dir, work_dir, exponents, out_dir, config, seed } => {
            commands::fewshot(
                &source_model, &data_dir, &work_dir, &exponents, out_dir,
                config.as_deref(), seed,
            )
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code_for(&err))
        }
    }
}
