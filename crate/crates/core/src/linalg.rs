//! Dense vector kernels on plain slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `x + alpha * d`
pub fn step(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect()
}

pub fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|v| -v).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// `‖g‖^e` via exp/log, with `0^e = 0`.
#[inline]
pub fn pow_norm(norm: f64, e: f64) -> f64 {
    if norm == 0.0 {
        0.0
    } else {
        (e * norm.ln()).exp()
    }
}
