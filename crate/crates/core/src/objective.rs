//! Objective functions and evaluation accounting.

use crate::error::{Error, Result};
use crate::linalg::all_finite;

/// A smooth function `f: R^n -> R` with an analytic gradient.
///
/// Implementations are immutable; evaluation counts are kept by [`Oracle`].
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇f(x)` into `out` (length `dim()`).
    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
}

/// Counting front-end to an [`Objective`].
///
/// Every call to [`Oracle::evaluate`] or [`Oracle::gradient`] bumps the
/// matching counter, whether or not the result is finite.
pub struct Oracle<'a> {
    obj: &'a dyn Objective,
    n_f: usize,
    n_g: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(obj: &'a dyn Objective) -> Self {
        Oracle { obj, n_f: 0, n_g: 0 }
    }

    pub fn dim(&self) -> usize {
        self.obj.dim()
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn n_g(&self) -> usize {
        self.n_g
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.obj.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.obj.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        self.n_f += 1;
        let f = self.obj.value(x);
        if !f.is_finite() {
            return Err(Error::NonFinite { what: "function value" });
        }
        Ok(f)
    }

    pub fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        self.n_g += 1;
        let g = self.obj.gradient(x);
        if g.len() != self.obj.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.obj.dim(),
                got: g.len(),
            });
        }
        if !all_finite(&g) {
            return Err(Error::NonFinite { what: "gradient" });
        }
        Ok(g)
    }
}

/// Largest discrepancy between the analytic gradient and central differences.
///
/// Per coordinate the error is relative to `|∇f(x)_i|`, or absolute when that
/// magnitude is below 1.
pub fn check_gradient(obj: &dyn Objective, x: &[f64], h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let g = obj.gradient(x);
    let mut xp = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = obj.value(&xp);
        xp[i] = xi - h;
        let fm = obj.value(&xp);
        xp[i] = xi;
        let fd = (fp - fm) / (2.0 * h);
        let scale = g[i].abs().max(1.0);
        worst = worst.max((g[i] - fd).abs() / scale);
    }
    worst
}
