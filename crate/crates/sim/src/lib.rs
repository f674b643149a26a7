//! Scenario configuration, the seeded Monte Carlo harness, and the CSV
//! output formats for the fdbeam simulator. The numerical work lives in
//! `fdbeam-core`; this crate owns everything that touches files, threads,
//! and the command line.

pub mod cli;
pub mod config;
pub mod csv;
pub mod run;

pub use config::{load_config, ScenarioConfig, SimError};
pub use run::{run_sweep, run_trial, SnrAggregate, SweepResult, TrialResult};
