use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use decohere::experiment::{self, ExperimentConfig, ModeOverride, Overrides, RunError};
use decohere::mc::Engine;

/// Batch runner for decoherence experiments.
///
/// Exit status: 0 when every requested check passes or is inapplicable,
/// 1 when a check fails, 2 on config, dimension or IO errors. The worker
/// count is read from DECOHERE_WORKERS (default: available parallelism).
#[derive(Parser)]
#[command(name = "decohere", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its report.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        /// First seed of a consecutive run replacing the config's seeds.
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        output_dir,
        seed_override,
        mode,
        trials,
        quiet,
    } = Cli::parse().command;
    let overrides = Overrides {
        mode: mode.map(|m| match m {
            Mode::Exact => ModeOverride::Exact,
            Mode::Mc => ModeOverride::MonteCarlo,
        }),
        trials,
        seed: seed_override,
    };
    match run(&config, &output_dir, &overrides, quiet) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(config: &Path, dir: &Path, overrides: &Overrides, quiet: bool) -> Result<bool, RunError> {
    let mut cfg = ExperimentConfig::load(config)?;
    cfg.apply(overrides);
    let report = experiment::run_experiment(&cfg, &Engine::from_env())?;
    let written = experiment::write_outputs(&report, dir)?;
    if !quiet {
        for r in &report.reports {
            let id = serde_json::to_value(r.id).unwrap_or_default();
            let verdict = serde_json::to_value(r.verdict).unwrap_or_default();
            let id = id.as_str().unwrap_or("?");
            let verdict = verdict.as_str().unwrap_or("?");
            match &r.note {
                Some(note) => println!("{id:<24} {verdict:<13} {note}"),
                None => println!("{id:<24} {verdict}"),
            }
        }
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(report.all_passed)
}
