//! Solver drivers.
//!
//! [`run_restarted_ncg`] is the restarted conjugate gradient loop: Armijo
//! backtracking along `d_k`, a new gradient, a conjugate parameter, the
//! proposed direction `−g_{k+1} + β d_k`, and a restart test that may reset it
//! to `−g_{k+1}`. Gradient descent is the same loop with every direction
//! reset. [`run_semi_adaptive_gd`] is a separate baseline that adapts an
//! estimate of the gradient Lipschitz constant instead of backtracking.

use serde::{Deserialize, Serialize};

use crate::certificate::CertificateReport;
use crate::config::{RestartKind, SolverConfig};
use crate::directions::{compute_beta, propose_direction, restart_test, RestartPolicy};
use crate::error::{Error, Result};
use crate::linalg::{dot, neg, norm, step};
use crate::linesearch::{armijo_backtrack, initial_step};
use crate::objective::{Objective, Oracle};

const SEMI_ADAPTIVE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Converged,
    BudgetExhausted,
    LinesearchFailed,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Converged => "CONVERGED",
            Status::BudgetExhausted => "BUDGET_EXHAUSTED",
            Status::LinesearchFailed => "LINESEARCH_FAILED",
        }
    }
}

/// One accepted iteration `k`, describing the step taken from `x_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub alpha: f64,
    pub backtracks: usize,
    /// `d_k = −g_k` because of a restart (always set for `k = 0`).
    pub restarted: bool,
    /// Conjugate parameter proposed for `d_k`, kept even when the restart
    /// discarded it; 0 when none was computed.
    pub beta: f64,
    /// `g_kᵀ d_k`
    pub slope: f64,
    /// `‖d_k‖`
    pub direction_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub status: Status,
    /// Number of accepted iterations `K`.
    pub iterations: usize,
    /// Function evaluations after the initial `f(x_0)`; equals
    /// `Σ (j_k + 1)` for the backtracking solvers.
    pub n_f: usize,
    /// Gradient evaluations including `∇f(x_0)`.
    pub n_g: usize,
    pub initial_f: f64,
    pub initial_grad_norm: f64,
    pub final_f: f64,
    pub final_grad_norm: f64,
    /// Threshold the stopping rule compared `‖g_k‖` against.
    pub tolerance: f64,
    pub x: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    /// Restart tests evaluated (one per direction built after `d_0`).
    pub restart_tests: usize,
    /// Restart tests that fired.
    pub restarts: usize,
    /// Cause of a `LinesearchFailed` status.
    pub failure: Option<String>,
    pub certificate: Option<CertificateReport>,
}

impl RunResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Percentage of restart tests that fired; `None` when no test was made.
    pub fn restart_pct(&self) -> Option<f64> {
        (self.restart_tests > 0).then(|| 100.0 * self.restarts as f64 / self.restart_tests as f64)
    }

    /// `f(x_{k+1})` for the trace record `k`.
    pub fn f_after(&self, k: usize) -> f64 {
        self.trace.get(k + 1).map_or(self.final_f, |r| r.f)
    }
}

struct Run<'a> {
    oracle: Oracle<'a>,
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
    initial_f: f64,
    initial_grad_norm: f64,
    tolerance: f64,
    trace: Vec<IterationRecord>,
    restart_tests: usize,
    restarts: usize,
}

enum Start<'a> {
    Ready(Box<Run<'a>>),
    Failed(RunResult),
}

fn start<'a>(obj: &'a dyn Objective, x0: &[f64], config: &SolverConfig) -> Result<Start<'a>> {
    config.validate()?;
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            got: x0.len(),
        });
    }
    let mut oracle = Oracle::new(obj);
    let fail = |oracle: &Oracle<'_>, f: f64, e: Error| RunResult {
        status: Status::LinesearchFailed,
        iterations: 0,
        n_f: oracle.n_f().saturating_sub(1),
        n_g: oracle.n_g(),
        initial_f: f,
        initial_grad_norm: f64::NAN,
        final_f: f,
        final_grad_norm: f64::NAN,
        tolerance: f64::NAN,
        x: x0.to_vec(),
        trace: Vec::new(),
        restart_tests: 0,
        restarts: 0,
        failure: Some(e.to_string()),
        certificate: None,
    };
    let f = match oracle.evaluate(x0) {
        Ok(f) => f,
        Err(e) => return Ok(Start::Failed(fail(&oracle, f64::NAN, e))),
    };
    let g = match oracle.gradient(x0) {
        Ok(g) => g,
        Err(e) => return Ok(Start::Failed(fail(&oracle, f, e))),
    };
    let gn = norm(&g);
    Ok(Start::Ready(Box::new(Run {
        oracle,
        x: x0.to_vec(),
        f,
        g,
        initial_f: f,
        initial_grad_norm: gn,
        tolerance: config.threshold(gn),
        trace: Vec::new(),
        restart_tests: 0,
        restarts: 0,
    })))
}

impl Run<'_> {
    fn finish(self, status: Status, failure: Option<Error>) -> RunResult {
        RunResult {
            status,
            iterations: self.trace.len(),
            n_f: self.oracle.n_f() - 1,
            n_g: self.oracle.n_g(),
            initial_f: self.initial_f,
            initial_grad_norm: self.initial_grad_norm,
            final_f: self.f,
            final_grad_norm: norm(&self.g),
            tolerance: self.tolerance,
            x: self.x,
            trace: self.trace,
            restart_tests: self.restart_tests,
            restarts: self.restarts,
            failure: failure.map(|e| e.to_string()),
            certificate: None,
        }
    }

    /// Stopping test at the current iterate; `None` means keep going.
    fn should_stop(&self, max_iterations: usize) -> Option<Status> {
        if norm(&self.g) <= self.tolerance {
            Some(Status::Converged)
        } else if self.trace.len() >= max_iterations {
            Some(Status::BudgetExhausted)
        } else {
            None
        }
    }
}

/// Restarted nonlinear conjugate gradient.
///
/// Returns `Err` only for invalid input (configuration or dimension); a
/// failed line search or a non-finite evaluation ends the run with
/// [`Status::LinesearchFailed`] and the partial trace.
pub fn run_restarted_ncg(obj: &dyn Objective, x0: &[f64], config: &SolverConfig) -> Result<RunResult> {
    let mut run = match start(obj, x0, config)? {
        Start::Ready(run) => run,
        Start::Failed(result) => return Ok(result),
    };
    let policy = RestartPolicy::from_config(config);
    let mut d = neg(&run.g);
    let mut restarted = true;
    let mut beta = 0.0;
    let mut alpha_prev = None;

    loop {
        if let Some(status) = run.should_stop(config.max_iterations) {
            return Ok(run.finish(status, None));
        }
        let k = run.trace.len();
        let grad_norm = norm(&run.g);
        let slope = dot(&run.g, &d);
        let alpha_init = initial_step(config.warm_start, alpha_prev);
        let ls = match armijo_backtrack(
            &mut run.oracle,
            &run.x,
            run.f,
            &run.g,
            &d,
            config.eta,
            config.theta,
            alpha_init,
            config.max_backtracks,
        ) {
            Ok(ls) => ls,
            Err(e) => return Ok(run.finish(Status::LinesearchFailed, Some(e))),
        };
        let g_new = match run.oracle.gradient(&ls.x_new) {
            Ok(g) => g,
            Err(e) => return Ok(run.finish(Status::LinesearchFailed, Some(e))),
        };
        run.trace.push(IterationRecord {
            k,
            f: run.f,
            grad_norm,
            alpha: ls.alpha,
            backtracks: ls.backtracks,
            restarted,
            beta,
            slope,
            direction_norm: norm(&d),
        });
        alpha_prev = Some(ls.alpha);
        run.x = ls.x_new;
        run.f = ls.f_new;
        let g_old = std::mem::replace(&mut run.g, g_new);

        // The next direction is only built if another iteration will use it.
        if run.should_stop(config.max_iterations).is_some() {
            continue;
        }
        run.restart_tests += 1;
        let (d_new, fired, b) = next_direction(config, &policy, &run.g, &g_old, &d);
        if fired {
            run.restarts += 1;
        }
        d = d_new;
        restarted = fired;
        beta = b;
    }
}

fn next_direction(
    config: &SolverConfig,
    policy: &RestartPolicy,
    g: &[f64],
    g_old: &[f64],
    d_old: &[f64],
) -> (Vec<f64>, bool, f64) {
    if config.restart == RestartKind::Always {
        return (neg(g), true, 0.0);
    }
    match compute_beta(config.beta, g, g_old, d_old) {
        Ok(b) => {
            let proposed = propose_direction(g, b, d_old);
            if restart_test(policy, g, &proposed, g_old) {
                (neg(g), true, b)
            } else {
                (proposed, false, b)
            }
        }
        Err(_) => (neg(g), true, 0.0),
    }
}

/// Armijo gradient descent: the restarted loop with every direction reset.
pub fn run_gradient_descent(obj: &dyn Objective, x0: &[f64], config: &SolverConfig) -> Result<RunResult> {
    let config = SolverConfig {
        restart: RestartKind::Always,
        ..config.clone()
    };
    run_restarted_ncg(obj, x0, &config)
}

/// Gradient descent with an adaptive Lipschitz estimate `L̂`.
///
/// The step `x − g/L̂` is accepted when
/// `f(x − g/L̂) ≤ f(x) − ‖g‖²/(2L̂)`; otherwise `L̂` doubles. After each
/// acceptance `L̂` is halved (floored at 1e-12) for the next iteration.
/// Starts from `L̂ = 1` and ignores the warm-start setting. Trace records
/// carry `α = 1/L̂` at acceptance and the number of doublings as backtracks.
pub fn run_semi_adaptive_gd(obj: &dyn Objective, x0: &[f64], config: &SolverConfig) -> Result<RunResult> {
    let mut run = match start(obj, x0, config)? {
        Start::Ready(run) => run,
        Start::Failed(result) => return Ok(result),
    };
    let mut l_hat = 1.0f64;
    loop {
        if let Some(status) = run.should_stop(config.max_iterations) {
            return Ok(run.finish(status, None));
        }
        let k = run.trace.len();
        let gn = norm(&run.g);
        let gg = dot(&run.g, &run.g);
        let mut doublings = 0;
        let (x_new, f_new) = loop {
            let x_trial = step(&run.x, -1.0 / l_hat, &run.g);
            let f_trial = match run.oracle.evaluate(&x_trial) {
                Ok(f) => f,
                Err(e) => return Ok(run.finish(Status::LinesearchFailed, Some(e))),
            };
            if f_trial <= run.f - gg / (2.0 * l_hat) {
                break (x_trial, f_trial);
            }
            if doublings == config.max_backtracks {
                let e = Error::LineSearchFailed { backtracks: doublings };
                return Ok(run.finish(Status::LinesearchFailed, Some(e)));
            }
            l_hat *= 2.0;
            doublings += 1;
        };
        let g_new = match run.oracle.gradient(&x_new) {
            Ok(g) => g,
            Err(e) => return Ok(run.finish(Status::LinesearchFailed, Some(e))),
        };
        run.trace.push(IterationRecord {
            k,
            f: run.f,
            grad_norm: gn,
            alpha: 1.0 / l_hat,
            backtracks: doublings,
            restarted: true,
            beta: 0.0,
            slope: -gg,
            direction_norm: gn,
        });
        run.x = x_new;
        run.f = f_new;
        run.g = g_new;
        l_hat = (l_hat / 2.0).max(SEMI_ADAPTIVE_FLOOR);
        if run.should_stop(config.max_iterations).is_none() {
            run.restart_tests += 1;
            run.restarts += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{BetaFormula, WarmStart};
    use crate::objective::testing::{HalfSquaredNorm, Poisoned, ScaledQuadratic};

    fn tight(c: SolverConfig) -> SolverConfig {
        SolverConfig { epsilon: 1e-8, ..c }
    }

    #[test]
    fn quadratic_converges_for_every_formula() {
        let q = HalfSquaredNorm(2);
        for beta in [
            BetaFormula::FletcherReeves,
            BetaFormula::PolakRibiere,
            BetaFormula::PolakRibierePlus,
            BetaFormula::HagerZhang,
        ] {
            let r = run_restarted_ncg(&q, &[1.0, 0.0], &tight(SolverConfig::restarted(0.5, beta))).unwrap();
            assert_eq!(r.status, Status::Converged);
            assert!(r.final_grad_norm <= 1e-8);
            assert!(r.trace.windows(2).all(|w| w[1].f < w[0].f));
        }
    }

    #[test]
    fn stationary_start_returns_immediately() {
        let q = HalfSquaredNorm(3);
        let r = run_restarted_ncg(&q, &[0.0; 3], &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert_eq!(r.iterations, 0);
        assert!(r.trace.is_empty());
        assert_eq!((r.n_f, r.n_g), (0, 1));
        assert_eq!(r.restart_pct(), None);
        let r = run_semi_adaptive_gd(&q, &[0.0; 3], &SolverConfig::default()).unwrap();
        assert_eq!((r.status, r.iterations), (Status::Converged, 0));
    }

    #[test]
    fn gradient_descent_restarts_everything() {
        let q = ScaledQuadratic(vec![1.0, 3.0, 0.5]);
        let r = run_gradient_descent(&q, &[1.0, -1.0, 2.0], &tight(SolverConfig::default())).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!(r.trace.iter().all(|t| t.restarted && t.beta == 0.0));
        assert_eq!(r.restart_pct(), Some(100.0));
    }

    #[test]
    fn counters_match_trace_under_unit_warm_start() {
        let q = ScaledQuadratic(vec![1.0, 10.0, 0.1, 4.0]);
        let c = tight(SolverConfig::restarted(0.75, BetaFormula::PolakRibierePlus)).with_warm_start(WarmStart::Unit);
        let r = run_restarted_ncg(&q, &[1.0, 1.0, 1.0, 1.0], &c).unwrap();
        assert_eq!(r.n_g, r.iterations + 1);
        assert_eq!(r.n_f, r.trace.iter().map(|t| t.backtracks + 1).sum::<usize>());
        assert!(r.n_f >= r.iterations);
        assert!(r.trace[0].restarted);
        assert_eq!(r.restart_tests, r.iterations - 1);
    }

    #[test]
    fn budget_is_respected() {
        let q = ScaledQuadratic(vec![1.0, 1e4]);
        let c = SolverConfig { max_iterations: 3, epsilon: 1e-12, ..SolverConfig::gradient_descent() };
        let r = run_gradient_descent(&q, &[1.0, 1.0], &c).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
        assert_eq!(r.iterations, 3);
        assert_eq!(r.restart_tests, 2);
    }

    #[test]
    fn non_finite_start_fails_cleanly() {
        let r = run_restarted_ncg(&Poisoned, &[0.0], &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::LinesearchFailed);
        assert!(r.failure.is_some());
    }

    #[test]
    fn invalid_inputs_are_errors() {
        let q = HalfSquaredNorm(2);
        assert!(run_restarted_ncg(&q, &[1.0], &SolverConfig::default()).is_err());
        let bad = SolverConfig { eta: 2.0, ..Default::default() };
        assert!(run_restarted_ncg(&q, &[1.0, 1.0], &bad).is_err());
    }

    #[test]
    fn semi_adaptive_accepts_first_proposal_on_unit_curvature() {
        let q = HalfSquaredNorm(2);
        let r = run_semi_adaptive_gd(&q, &[3.0, 4.0], &SolverConfig::default()).unwrap();
        assert_eq!(r.trace[0].backtracks, 0);
        assert_eq!(r.trace[0].alpha, 1.0);
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn semi_adaptive_doubles_up_to_twice_the_curvature() {
        // L = 4: the unit estimate overshoots
        let q = ScaledQuadratic(vec![4.0, 1.0]);
        let r = run_semi_adaptive_gd(&q, &[1.0, 0.0], &SolverConfig::default()).unwrap();
        assert!(r.trace[0].backtracks >= 1);
        for t in &r.trace {
            let l_hat = 1.0 / t.alpha;
            assert!(l_hat <= 8.0, "estimate {l_hat}");
        }
        assert!(r.trace.windows(2).all(|w| w[1].f < w[0].f));
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let q = ScaledQuadratic(vec![1.0, 7.0, 0.3]);
        let c = SolverConfig::restarted(0.25, BetaFormula::HagerZhang);
        let a = run_restarted_ncg(&q, &[1.0, 2.0, 3.0], &c).unwrap();
        let b = run_restarted_ncg(&q, &[1.0, 2.0, 3.0], &c).unwrap();
        assert_eq!(a, b);
    }
}
