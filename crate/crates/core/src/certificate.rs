//! Runtime audit of a finished run against the worst-case guarantees of the
//! restarted scheme.
//!
//! With `L` an upper bound on the gradient Lipschitz constant, every
//! iteration whose direction was kept (set `N`) satisfies
//!
//! * `j_k ≤ ⌊j̄_N,k + 1⌋`, `j̄_N,k = [log_θ(2(1−η)σ ‖g_k‖^{1+p−2q} / (κ²L))]_+`
//! * `f_k − f_{k+1} > c_N min{‖g_k‖^{1+p}, ‖g_k‖^{2(1+p−q)}}`,
//!   `c_N = ησ min{1, 2(1−η)σθ/(κ²L)}`
//!
//! and every restarted iteration (set `R`, `d_k = −g_k`) satisfies
//!
//! * `j_k ≤ ⌊j̄_R + 1⌋`, `j̄_R = [log_θ(2(1−η)/L)]_+`
//! * `f_k − f_{k+1} > c_R ‖g_k‖²`, `c_R = η min{1, 2(1−η)θ/L}`.
//!
//! Given a lower bound `f_low`, summing the decreases bounds the iteration
//! count by
//! `K_ε = ⌊(f_0 − f_low)/c_R ε^{-2} + (f_0 − f_low)/c_N ε^{-max{1+p, 2(1+p−q)}}⌋`,
//! and when `1 + p = 2q` the function evaluations by
//! `⌊[log_θ(2(1−η)σ/(κ²L))]_+ + 1⌋ K_ε`.
//!
//! The per-iteration checks assume `α_k = θ^{j_k}`, so they are only made for
//! runs with the unit warm start.

use serde::{Deserialize, Serialize};

use crate::config::{RestartKind, SolverConfig, WarmStart};
use crate::linalg::pow_norm;
use crate::linesearch::armijo_holds;
use crate::solver::RunResult;

/// `K` this many times below `K_ε` marks the iteration bound as weak.
const WEAK_BOUND_RATIO: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub l_bound: Option<f64>,
    pub f_low: Option<f64>,
    /// Whether the per-iteration checks (decrease, backtracks, bounds) ran.
    pub step_checks_applicable: bool,
    pub armijo_violations: usize,
    /// Kept directions failing `gᵀd ≤ −σ‖g‖^{1+p}` or `‖d‖ ≤ κ‖g‖^q`.
    /// `None` for restart policies without that guarantee.
    pub direction_violations: Option<usize>,
    /// Non-restarted iterations below the `c_N` decrease.
    pub decrease_n_violations: Option<usize>,
    /// Restarted iterations below the `c_R ‖g‖²` decrease.
    pub decrease_r_violations: Option<usize>,
    pub backtrack_bound_violations: Option<usize>,
    /// Trace points or final value below `f_low`.
    pub f_low_violations: Option<usize>,
    pub c_n: Option<f64>,
    pub c_r: Option<f64>,
    pub k_epsilon: Option<f64>,
    pub iterations_within_k_epsilon: Option<bool>,
    /// `K` is orders of magnitude below `K_ε`.
    pub k_epsilon_weak: bool,
    pub eval_bound: Option<f64>,
    pub evals_within_bound: Option<bool>,
    pub n_count: usize,
    pub r_count: usize,
}

impl CertificateReport {
    pub fn decrease_violations(&self) -> Option<usize> {
        match (self.decrease_n_violations, self.decrease_r_violations) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        }
    }

    pub fn total_violations(&self) -> usize {
        let counts = [
            Some(self.armijo_violations),
            self.direction_violations,
            self.decrease_n_violations,
            self.decrease_r_violations,
            self.backtrack_bound_violations,
            self.f_low_violations,
        ];
        let bounds = [self.iterations_within_k_epsilon, self.evals_within_bound]
            .iter()
            .filter(|b| **b == Some(false))
            .count();
        counts.iter().flatten().sum::<usize>() + bounds
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0
    }
}

fn log_theta(theta: f64, v: f64) -> f64 {
    v.ln() / theta.ln()
}

fn positive_part(v: f64) -> f64 {
    v.max(0.0)
}

/// Audits `result` (run with `config`) and returns the report; never fails.
pub fn certificate_check(
    result: &RunResult,
    config: &SolverConfig,
    l_bound: Option<f64>,
    f_low: Option<f64>,
) -> CertificateReport {
    let SolverConfig {
        eta,
        theta,
        sigma,
        kappa,
        p,
        q,
        ..
    } = *config;
    let modified = config.restart == RestartKind::Modified;
    let certified_policy = modified || config.restart == RestartKind::Always;
    let step_checks = config.warm_start == WarmStart::Unit && certified_policy;

    let r_count = result.trace.iter().filter(|r| r.restarted).count();
    let n_count = result.trace.len() - r_count;

    let mut armijo = 0;
    let mut direction = 0;
    for (k, rec) in result.trace.iter().enumerate() {
        let f_next = result.f_after(k);
        if !armijo_holds(f_next, rec.f, eta, rec.alpha, rec.slope) {
            armijo += 1;
        }
        if modified && !rec.restarted {
            let ok = rec.slope <= -sigma * pow_norm(rec.grad_norm, 1.0 + p)
                && rec.direction_norm <= kappa * pow_norm(rec.grad_norm, q);
            if !ok {
                direction += 1;
            }
        }
    }

    let mut report = CertificateReport {
        l_bound,
        f_low,
        step_checks_applicable: false,
        armijo_violations: armijo,
        direction_violations: certified_policy.then_some(direction),
        decrease_n_violations: None,
        decrease_r_violations: None,
        backtrack_bound_violations: None,
        f_low_violations: None,
        c_n: None,
        c_r: None,
        k_epsilon: None,
        iterations_within_k_epsilon: None,
        k_epsilon_weak: false,
        eval_bound: None,
        evals_within_bound: None,
        n_count,
        r_count,
    };

    if let Some(fl) = f_low {
        let below = result.trace.iter().filter(|r| r.f < fl).count() + usize::from(result.final_f < fl);
        report.f_low_violations = Some(below);
    }

    let Some(l) = l_bound.filter(|_| step_checks) else {
        return report;
    };
    report.step_checks_applicable = true;

    let kk = kappa * kappa;
    let c_n = eta * sigma * (2.0 * (1.0 - eta) * sigma * theta / (kk * l)).min(1.0);
    let c_r = eta * (2.0 * (1.0 - eta) * theta / l).min(1.0);
    report.c_n = modified.then_some(c_n);
    report.c_r = Some(c_r);

    let j_bar_r = positive_part(log_theta(theta, 2.0 * (1.0 - eta) / l));
    let mut dec_n = 0;
    let mut dec_r = 0;
    let mut backtracks = 0;
    for (k, rec) in result.trace.iter().enumerate() {
        let decrease = rec.f - result.f_after(k);
        let gn = rec.grad_norm;
        if rec.restarted {
            if !(decrease > c_r * gn * gn) {
                dec_r += 1;
            }
            if rec.backtracks as f64 > (j_bar_r + 1.0).floor() {
                backtracks += 1;
            }
        } else {
            let floor_term = pow_norm(gn, 1.0 + p).min(pow_norm(gn, 2.0 * (1.0 + p - q)));
            if !(decrease > c_n * floor_term) {
                dec_n += 1;
            }
            let arg = 2.0 * (1.0 - eta) * sigma / (kk * l) * pow_norm(gn, 1.0 + p - 2.0 * q);
            let j_bar_n = positive_part(log_theta(theta, arg));
            if rec.backtracks as f64 > (j_bar_n + 1.0).floor() {
                backtracks += 1;
            }
        }
    }
    report.decrease_n_violations = Some(dec_n);
    report.decrease_r_violations = Some(dec_r);
    report.backtrack_bound_violations = Some(backtracks);

    let Some(fl) = f_low else {
        return report;
    };
    if modified && 1.0 + p - q < 0.0 {
        return report;
    }
    let eps = result.tolerance;
    let gap = result.initial_f - fl;
    let mut k_eps = gap / c_r * eps.powi(-2);
    if modified {
        let expo = (1.0 + p).max(2.0 * (1.0 + p - q));
        k_eps += gap / c_n * eps.powf(-expo);
    }
    let k_eps = k_eps.floor();
    let k = result.iterations as f64;
    report.k_epsilon = Some(k_eps);
    report.iterations_within_k_epsilon = Some(k <= k_eps);
    report.k_epsilon_weak = k * WEAK_BOUND_RATIO < k_eps;

    let per_iteration = if modified {
        config
            .evaluation_bound_applies()
            .then(|| (positive_part(log_theta(theta, 2.0 * (1.0 - eta) * sigma / (kk * l))) + 1.0).floor())
    } else {
        Some((j_bar_r + 1.0).floor())
    };
    if let Some(per) = per_iteration {
        let bound = per * k_eps;
        report.eval_bound = Some(bound);
        report.evals_within_bound = Some(result.n_f as f64 <= bound);
    }
    report
}
