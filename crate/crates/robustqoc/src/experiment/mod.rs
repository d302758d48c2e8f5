//! Benchmark experiments, configuration, and artifact emission.

pub mod config;
pub mod output;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, TaskId};
pub use output::{emit_outputs, OutputManifest};
pub use report::{
    BlochSample, FidelityRow, NoiseKind, RunReport, Strategy, StrategyReport, StrategySelection,
};
pub use run::{
    bloch_vector, run_cz, run_experiment, run_hadamard, run_state_transfer, TaskSetup,
};
