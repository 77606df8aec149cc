//! Runs an experiment config through the library instead of the binary.
//!
//! `cargo run --example run_config -- crates/core/configs/partition_chain.json`

use decohere::experiment::{self, ExperimentConfig};
use decohere::mc::Engine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/partition_chain.json").into());
    let config = ExperimentConfig::load(path.as_ref())?;
    let report = experiment::run_experiment(&config, &Engine::from_env())?;
    for r in &report.reports {
        println!("{:?}: {:?}", r.id, r.verdict);
    }
    if let Some(csv) = report.trajectories_csv() {
        print!("{csv}");
    }
    Ok(())
}
