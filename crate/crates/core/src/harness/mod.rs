//! Experiment orchestration: configuration, parameter sweeps,
//! convergence-rate fitting, and the CSV/report output layer.

pub mod config;
pub mod io;
pub mod rate;
pub mod sweep;

pub use config::{
    parse_key_values, parse_pair_preset, parse_side_preset, ExperimentConfig, FluxSpec,
    InitialSpec, KeyValues, PathSpec, SolverKind,
};
pub use rate::fit_rate;
pub use sweep::{run_experiment, PointOutcome, SweepResult};
