//! Batch runner for the simulation study: configuration, per-run artifacts
//! and plots.

pub mod config;
pub mod run;
pub mod svg;

pub use config::{preset_text, validate_config, ConfigErrors, ExperimentConfig};
pub use run::{
    analyze_chain, chain_seed, run_experiment, run_single, ChainReport, ExperimentSummary,
    RunOutcome, TruthRecord,
};
