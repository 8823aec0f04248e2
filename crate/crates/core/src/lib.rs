//! Latency- and temperature-aware placement of serverless workflows across
//! cloud, edge and LEO satellite nodes.
//!
//! The crate models a Walker constellation with +grid inter-satellite links,
//! time-varying network graphs, satellite thermal behaviour, an in-memory
//! orchestrator with atomic commits, the HyperDrive scheduler with three
//! baselines, and an experiment harness.

pub mod constellation;
pub mod error;
pub mod geo;
pub mod harness;
pub mod infra;
pub mod model;
pub mod netgraph;
pub mod orchestrator;
pub mod scheduler;
pub mod thermal;
pub mod topology;

pub use error::{ConfigError, LookupError, SchedulingError};
pub use model::*;
