//! Configuration-driven experiment runner and benchmark harness for the
//! `polyprop` propagators.

pub mod benchmark;
pub mod config;
pub mod experiment;
pub mod identity;

pub use benchmark::{benchmark_compare, BenchLeg, BenchRow, Comparison};
pub use config::{parse_config, parse_config_with, ConfigError, Experiment, ModelConfig, RunConfig};
pub use experiment::{run_experiment, ExperimentOutput, RunError};

/// Caps the global rayon pool at `POLYPROP_THREADS` when it is set.
pub fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("POLYPROP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("POLYPROP_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
