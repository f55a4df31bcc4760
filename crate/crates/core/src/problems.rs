//! Synthetic robust linear regression.
//!
//! Datasets follow `b = A z + 3 ν1 + ν2` with Gaussian design rows, a
//! Gaussian ground truth `z ~ N(0, 4 I)`, Gaussian noise `ν1 ~ N(0, I)` and
//! Bernoulli(0.3) outliers `ν2 ∈ {0, 1}`. The objective is the mean of a
//! bounded nonconvex loss applied to the residuals `a_iᵀ x − b_i`.
//!
//! Random numbers come from [`ChaCha8Rng`] seeded with
//! `SeedableRng::seed_from_u64(seed)`. Standard normals use the cosine branch
//! of the Box–Muller transform on two uniform draws each, so a dataset is a
//! pure function of `(n, m, seed)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;

pub const OUTLIER_PROBABILITY: f64 = 0.3;

/// Variance of the ground-truth vector `z`.
pub const TRUTH_VARIANCE: f64 = 4.0;

/// Draws retained from generation so `b` can be replayed.
#[derive(Debug, Clone, PartialEq)]
pub struct Intermediates {
    pub z: Vec<f64>,
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Design matrix, row-major `m × n`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Present for generated datasets, absent for imported ones.
    pub intermediates: Option<Intermediates>,
}

struct Gaussian<'a>(&'a mut ChaCha8Rng);

impl Gaussian<'_> {
    fn sample(&mut self) -> f64 {
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.0.random::<f64>();
        let u2 = self.0.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

pub fn generate_dataset(n: usize, m: usize, seed: u64) -> Result<RegressionDataset> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidDataset(format!(
            "dimensions must be positive (n={n}, m={m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = Gaussian(&mut rng);
    let a: Vec<f64> = (0..m * n).map(|_| gauss.sample()).collect();
    let sd = TRUTH_VARIANCE.sqrt();
    let z: Vec<f64> = (0..n).map(|_| sd * gauss.sample()).collect();
    let nu1: Vec<f64> = (0..m).map(|_| gauss.sample()).collect();
    let nu2: Vec<f64> = (0..m)
        .map(|_| {
            if rng.random::<f64>() < OUTLIER_PROBABILITY {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    RegressionDataset::from_parts(n, m, seed, a, z, nu1, nu2)
}

impl RegressionDataset {
    /// Assembles `b = A z + 3 ν1 + ν2` from explicit draws.
    pub fn from_parts(
        n: usize,
        m: usize,
        seed: u64,
        a: Vec<f64>,
        z: Vec<f64>,
        nu1: Vec<f64>,
        nu2: Vec<f64>,
    ) -> Result<Self> {
        if a.len() != m * n || z.len() != n || nu1.len() != m || nu2.len() != m {
            return Err(Error::InvalidDataset("inconsistent component lengths".into()));
        }
        let b = (0..m)
            .map(|i| {
                let row = &a[i * n..(i + 1) * n];
                crate::linalg::dot(row, &z) + 3.0 * nu1[i] + nu2[i]
            })
            .collect();
        Ok(RegressionDataset {
            n,
            m,
            seed,
            a,
            b,
            intermediates: Some(Intermediates { z, nu1, nu2 }),
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    /// Residuals `A x − b`.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| crate::linalg::dot(self.row(i), x) - self.b[i])
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = DatasetDoc {
            n: self.n,
            m: self.m,
            seed: self.seed,
            a: self.a.clone(),
            b: self.b.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: DatasetDoc = serde_json::from_str(s)?;
        if doc.n == 0 || doc.m == 0 || doc.a.len() != doc.n * doc.m || doc.b.len() != doc.m {
            return Err(Error::InvalidDataset(format!(
                "A must hold m*n = {} entries and b m = {} (got {} and {})",
                doc.n * doc.m,
                doc.m,
                doc.a.len(),
                doc.b.len()
            )));
        }
        Ok(RegressionDataset {
            n: doc.n,
            m: doc.m,
            seed: doc.seed,
            a: doc.a,
            b: doc.b,
            intermediates: None,
        })
    }
}

/// Interchange document: `A` is flattened row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetDoc {
    n: usize,
    m: usize,
    seed: u64,
    #[serde(rename = "A")]
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossKind {
    /// `φ(t) = t² / (1 + t²)`
    SmoothedBiweight,
    /// Tukey biweight `ρ_c`, constant `c²/6` outside `[-c, c]`.
    Tukey { c: f64 },
}

impl LossKind {
    pub fn tukey() -> Self {
        LossKind::Tukey { c: 6f64.sqrt() }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            LossKind::SmoothedBiweight => {
                let t2 = t * t;
                t2 / (1.0 + t2)
            }
            LossKind::Tukey { c } => {
                if t.abs() <= c {
                    tukey_inner(t, c)
                } else {
                    c * c / 6.0
                }
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            LossKind::SmoothedBiweight => {
                let s = 1.0 + t * t;
                2.0 * t / (s * s)
            }
            LossKind::Tukey { c } => {
                if t.abs() <= c {
                    tukey_inner_derivative(t, c)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        match *self {
            LossKind::SmoothedBiweight => {
                let t2 = t * t;
                let s = 1.0 + t2;
                2.0 * (1.0 - 3.0 * t2) / (s * s * s)
            }
            LossKind::Tukey { c } => {
                if t.abs() <= c {
                    let u = (t / c) * (t / c);
                    (1.0 - u) * (1.0 - 5.0 * u)
                } else {
                    0.0
                }
            }
        }
    }

    /// `sup_t |ψ''(t)|`.
    pub fn curvature_sup(&self) -> f64 {
        match self {
            LossKind::SmoothedBiweight => 2.0,
            LossKind::Tukey { .. } => 1.0,
        }
    }
}

/// Polynomial branch of `ρ_c`, written in `u = (t/c)²`.
pub(crate) fn tukey_inner(t: f64, c: f64) -> f64 {
    let u = (t / c) * (t / c);
    0.5 * t * t * (1.0 - u + u * u / 3.0)
}

pub(crate) fn tukey_inner_derivative(t: f64, c: f64) -> f64 {
    let u = (t / c) * (t / c);
    let w = 1.0 - u;
    t * w * w
}

/// `f(x) = (1/m) Σ ψ(a_iᵀ x − b_i)`.
#[derive(Debug, Clone)]
pub struct RegressionObjective {
    data: RegressionDataset,
    loss: LossKind,
}

impl RegressionObjective {
    pub fn new(data: RegressionDataset, loss: LossKind) -> Self {
        RegressionObjective { data, loss }
    }

    pub fn dataset(&self) -> &RegressionDataset {
        &self.data
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn lipschitz_bound(&self) -> f64 {
        lipschitz_bound(&self.data, self.loss)
    }
}

impl Objective for RegressionObjective {
    fn dim(&self) -> usize {
        self.data.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let m = self.data.m as f64;
        (0..self.data.m)
            .map(|i| {
                let r = crate::linalg::dot(self.data.row(i), x) - self.data.b[i];
                self.loss.value(r)
            })
            .sum::<f64>()
            / m
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.data.m {
            let row = self.data.row(i);
            let w = self.loss.derivative(crate::linalg::dot(row, x) - self.data.b[i]);
            if w != 0.0 {
                for (o, a) in out.iter_mut().zip(row) {
                    *o += w * a;
                }
            }
        }
        let m = self.data.m as f64;
        out.iter_mut().for_each(|o| *o /= m);
    }
}

pub fn loss_value_grad(
    data: &RegressionDataset,
    kind: LossKind,
    x: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if x.len() != data.n {
        return Err(Error::DimensionMismatch {
            expected: data.n,
            got: x.len(),
        });
    }
    let obj = RegressionObjective::new(data.clone(), kind);
    Ok((obj.value(x), obj.gradient(x)))
}

/// Upper bound `(s_ψ/m) λ_max(AᵀA)` on the Lipschitz constant of `∇f`.
pub fn lipschitz_bound(data: &RegressionDataset, kind: LossKind) -> f64 {
    let a = DMatrix::from_row_slice(data.m, data.n, &data.a);
    let gram = a.transpose() * &a;
    let lambda_max = gram
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    kind.curvature_sup() * lambda_max / data.m as f64
}
