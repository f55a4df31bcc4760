//! Conjugate parameters, direction updates and restart tests.

use crate::config::{BetaFormula, RestartKind, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, pow_norm, sub};

/// Returns `β_{k+1}` for the given formula.
///
/// `FR`, `PR` and `PRP+` need `‖g_old‖ > 0`; `HZ` needs `d_oldᵀ y` to be
/// bounded away from zero with `y = g_new − g_old`. Otherwise
/// [`Error::DegenerateBeta`] is returned and the caller should restart.
pub fn compute_beta(
    formula: BetaFormula,
    g_new: &[f64],
    g_old: &[f64],
    d_old: &[f64],
) -> Result<f64> {
    let beta = match formula {
        BetaFormula::FletcherReeves => {
            let den = dot(g_old, g_old);
            if den == 0.0 {
                return Err(Error::DegenerateBeta);
            }
            dot(g_new, g_new) / den
        }
        BetaFormula::PolakRibiere | BetaFormula::PolakRibierePlus => {
            let den = dot(g_old, g_old);
            if den == 0.0 {
                return Err(Error::DegenerateBeta);
            }
            let pr = dot(g_new, &sub(g_new, g_old)) / den;
            if formula == BetaFormula::PolakRibierePlus {
                pr.max(0.0)
            } else {
                pr
            }
        }
        BetaFormula::HagerZhang => {
            let y = sub(g_new, g_old);
            let dy = dot(d_old, &y);
            let yy = dot(&y, &y);
            if dy.abs() < 1e-300 * (norm(d_old) * yy.sqrt()).max(1.0) {
                return Err(Error::DegenerateBeta);
            }
            (dot(&y, g_new) - 2.0 * yy / dy * dot(d_old, g_new)) / dy
        }
    };
    if beta.is_finite() {
        Ok(beta)
    } else {
        Err(Error::DegenerateBeta)
    }
}

/// `−g_new + β d_old`
pub fn propose_direction(g_new: &[f64], beta: f64, d_old: &[f64]) -> Vec<f64> {
    g_new.iter().zip(d_old).map(|(g, d)| -g + beta * d).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestartPolicy {
    Modified { sigma: f64, kappa: f64, p: f64, q: f64 },
    Standard,
    Orthogonality { sigma: f64 },
    Always,
}

impl RestartPolicy {
    pub fn from_config(c: &SolverConfig) -> Self {
        match c.restart {
            RestartKind::Modified => RestartPolicy::Modified {
                sigma: c.sigma,
                kappa: c.kappa,
                p: c.p,
                q: c.q,
            },
            RestartKind::Standard => RestartPolicy::Standard,
            RestartKind::Orthogonality => RestartPolicy::Orthogonality { sigma: c.sigma_orth },
            RestartKind::Always => RestartPolicy::Always,
        }
    }
}

/// `true` when the proposed `d_new` must be replaced by `−g_new`.
pub fn restart_test(policy: &RestartPolicy, g_new: &[f64], d_new: &[f64], g_old: &[f64]) -> bool {
    match *policy {
        RestartPolicy::Modified { sigma, kappa, p, q } => {
            let gn = norm(g_new);
            dot(g_new, d_new) >= -sigma * pow_norm(gn, 1.0 + p) || norm(d_new) >= kappa * pow_norm(gn, q)
        }
        RestartPolicy::Standard => dot(g_new, d_new) >= 0.0,
        // Non-descent directions are also reset: the line search cannot use them.
        RestartPolicy::Orthogonality { sigma } => {
            dot(g_old, g_new).abs() >= sigma * dot(g_old, g_old) || dot(g_new, d_new) >= 0.0
        }
        RestartPolicy::Always => true,
    }
}

/// Gradient-relatedness of a kept direction: `gᵀd ≤ −σ‖g‖^{1+p}` and
/// `‖d‖ ≤ κ‖g‖^q`.
pub fn gradient_related(g: &[f64], d: &[f64], sigma: f64, kappa: f64, p: f64, q: f64) -> bool {
    let gn = norm(g);
    dot(g, d) <= -sigma * pow_norm(gn, 1.0 + p) && norm(d) <= kappa * pow_norm(gn, q)
}
