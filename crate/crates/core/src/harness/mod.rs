//! Experiment harness: scenario files, world construction, the
//! scheduler x size x seed matrix, metrics and result files.

pub mod checks;
pub mod export;
pub mod metrics;
pub mod output;
pub mod run;
pub mod scenario;
pub mod world;

pub use metrics::{summarize, Summary};
pub use run::{run_cell, run_experiment, ExperimentRecord, RunOptions};
pub use scenario::{load_scenario, ScenarioConfig, SchedulerKind};
pub use world::{build_world, World};
