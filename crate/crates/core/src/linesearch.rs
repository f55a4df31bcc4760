//! Armijo backtracking.

use crate::config::WarmStart;
use crate::error::{Error, Result};
use crate::linalg::{dot, step};
use crate::objective::Oracle;

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub backtracks: usize,
    pub x_new: Vec<f64>,
    pub f_new: f64,
    /// Function evaluations spent, `backtracks + 1`.
    pub n_evals: usize,
}

/// The Armijo test, strict: `f_new < f_x + η α gᵀd`.
#[inline]
pub fn armijo_holds(f_new: f64, f_x: f64, eta: f64, alpha: f64, slope: f64) -> bool {
    f_new < f_x + eta * alpha * slope
}

/// Returns the first step in `α_init, θ α_init, θ² α_init, …` passing the
/// strict Armijo test.
///
/// Fails with [`Error::LineSearchFailed`] once `max_backtracks` reductions
/// have been rejected, and propagates non-finite evaluations.
#[allow(clippy::too_many_arguments)]
pub fn armijo_backtrack(
    oracle: &mut Oracle<'_>,
    x: &[f64],
    f_x: f64,
    g: &[f64],
    d: &[f64],
    eta: f64,
    theta: f64,
    alpha_init: f64,
    max_backtracks: usize,
) -> Result<LineSearchOutcome> {
    let slope = dot(g, d);
    debug_assert!(slope < 0.0, "search direction is not a descent direction");
    let mut alpha = alpha_init;
    for j in 0..=max_backtracks {
        let x_new = step(x, alpha, d);
        let f_new = oracle.evaluate(&x_new)?;
        if armijo_holds(f_new, f_x, eta, alpha, slope) {
            return Ok(LineSearchOutcome {
                alpha,
                backtracks: j,
                x_new,
                f_new,
                n_evals: j + 1,
            });
        }
        alpha *= theta;
    }
    Err(Error::LineSearchFailed {
        backtracks: max_backtracks,
    })
}

pub fn initial_step(policy: WarmStart, previous: Option<f64>) -> f64 {
    match (policy, previous) {
        (WarmStart::Unit, _) | (WarmStart::DoublePrevious, None) => 1.0,
        (WarmStart::DoublePrevious, Some(a)) => 2.0 * a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::testing::HalfSquaredNorm;
    use crate::objective::Objective;

    struct Square;

    impl Objective for Square {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0] * x[0]
        }
        fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
            out[0] = 2.0 * x[0];
        }
    }

    #[test]
    fn square_needs_two_backtracks() {
        let mut o = Oracle::new(&Square);
        let out = armijo_backtrack(&mut o, &[1.0], 1.0, &[2.0], &[-2.0], 0.5, 0.5, 1.0, 60).unwrap();
        assert_eq!(out.alpha, 0.25);
        assert_eq!(out.backtracks, 2);
        assert_eq!(out.x_new, vec![0.5]);
        assert_eq!(out.f_new, 0.25);
        assert_eq!(out.n_evals, 3);
        assert_eq!(o.n_f(), 3);
    }

    #[test]
    fn equality_is_rejected() {
        // α = 1 lands exactly on 0 < 0, which must backtrack once more.
        let q = HalfSquaredNorm(2);
        let mut o = Oracle::new(&q);
        let out =
            armijo_backtrack(&mut o, &[1.0, 0.0], 0.5, &[1.0, 0.0], &[-1.0, 0.0], 0.5, 0.5, 1.0, 60).unwrap();
        assert_eq!(out.alpha, 0.5);
        assert_eq!(out.backtracks, 1);
        assert_eq!(out.f_new, 0.125);
    }

    #[test]
    fn exhausted_backtracks_fail() {
        let mut o = Oracle::new(&Square);
        // ascent direction passed off as descent: nothing is ever accepted
        let err = armijo_backtrack(&mut o, &[1.0], 1.0, &[-2.0], &[2.0], 0.5, 0.5, 1.0, 5);
        assert_eq!(err, Err(Error::LineSearchFailed { backtracks: 5 }));
        assert_eq!(o.n_f(), 6);
    }

    #[test]
    fn steps_follow_geometric_sequence() {
        let mut o = Oracle::new(&Square);
        let out = armijo_backtrack(&mut o, &[1.0], 1.0, &[2.0], &[-2.0], 0.1, 0.3, 8.0, 60).unwrap();
        let expected = 8.0 * 0.3f64.powi(out.backtracks as i32);
        assert!((out.alpha - expected).abs() <= 1e-14 * expected);
        assert!(armijo_holds(out.f_new, 1.0, 0.1, out.alpha, -4.0));
    }

    #[test]
    fn warm_start_policies() {
        assert_eq!(initial_step(WarmStart::Unit, Some(0.25)), 1.0);
        assert_eq!(initial_step(WarmStart::DoublePrevious, Some(0.25)), 0.5);
        assert_eq!(initial_step(WarmStart::DoublePrevious, None), 1.0);
        assert_eq!(initial_step(WarmStart::Unit, None), 1.0);
    }
}
