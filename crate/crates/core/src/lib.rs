//! Nonlinear conjugate gradient with a modified restart condition.
//!
//! The crate provides the objective abstraction with evaluation accounting,
//! robust-regression test problems, an Armijo backtracking line search, the
//! usual conjugate-direction formulas and restart tests, and solver drivers
//! whose traces can be audited against the worst-case decrease and iteration
//! bounds of the restarted scheme.

pub mod certificate;
pub mod classic;
pub mod config;
pub mod directions;
pub mod error;
pub mod linalg;
pub mod linesearch;
pub mod objective;
pub mod problems;
pub mod solver;
pub mod trace;

pub use certificate::{certificate_check, CertificateReport};
pub use classic::{classic_problem, ClassicProblem};
pub use config::{BetaFormula, RestartKind, SolverConfig, StopRule, WarmStart};
pub use directions::{compute_beta, propose_direction, restart_test, RestartPolicy};
pub use error::{Error, Result};
pub use linesearch::{armijo_backtrack, initial_step, LineSearchOutcome};
pub use objective::{check_gradient, Objective, Oracle};
pub use problems::{
    generate_dataset, lipschitz_bound, loss_value_grad, LossKind, RegressionDataset,
    RegressionObjective,
};
pub use solver::{
    run_gradient_descent, run_restarted_ncg, run_semi_adaptive_gd, IterationRecord, RunResult,
    Status,
};
