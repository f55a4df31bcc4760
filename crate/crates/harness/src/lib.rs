//! Batch experiments over the solver roster: instance suites, restart
//! statistics, data and performance profiles, certificate audits and the
//! `ncg-bench` command line.

pub mod certify;
pub mod cli;
pub mod config;
pub mod error;
pub mod gradcheck;
pub mod output;
pub mod profiles;
pub mod suite;

pub use config::{Emit, ExperimentConfig, SolverSpec, Suite};
pub use error::{HarnessError, Result};
pub use profiles::{data_profile, performance_profile, Metric, Profile};
pub use suite::{run_suite, Instance, RunRow, SolverStats, SuiteSummary};
