//! Small set of analytic test functions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Condition number of the diagonal quadratic.
pub const QUADRATIC_CONDITION: f64 = 1e4;

const RASTRIGIN_AMPLITUDE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassicProblem {
    Rosenbrock,
    ConvexQuadratic,
    RastriginSmooth,
}

impl ClassicProblem {
    pub const ALL: [ClassicProblem; 3] = [
        ClassicProblem::Rosenbrock,
        ClassicProblem::ConvexQuadratic,
        ClassicProblem::RastriginSmooth,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassicProblem::Rosenbrock => "ROSENBROCK",
            ClassicProblem::ConvexQuadratic => "CONVEX_QUADRATIC",
            ClassicProblem::RastriginSmooth => "RASTRIGIN_SMOOTH",
        }
    }

    pub fn min_dim(&self) -> usize {
        match self {
            ClassicProblem::Rosenbrock | ClassicProblem::ConvexQuadratic => 2,
            ClassicProblem::RastriginSmooth => 1,
        }
    }

    pub fn build(&self, n: usize) -> Result<Box<dyn Objective>> {
        if n < self.min_dim() {
            return Err(Error::InvalidConfig(format!(
                "{} needs n >= {}",
                self.name(),
                self.min_dim()
            )));
        }
        Ok(match self {
            ClassicProblem::Rosenbrock => Box::new(Rosenbrock { n }),
            ClassicProblem::ConvexQuadratic => Box::new(DiagonalQuadratic::ill_conditioned(n)),
            ClassicProblem::RastriginSmooth => Box::new(Rastrigin { n }),
        })
    }
}

impl fmt::Display for ClassicProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassicProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicProblem::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

pub fn classic_problem(name: &str, n: usize) -> Result<Box<dyn Objective>> {
    name.parse::<ClassicProblem>()?.build(n)
}

/// Chained Rosenbrock `Σ 100 (x_{i+1} − x_i²)² + (1 − x_i)²`.
pub struct Rosenbrock {
    n: usize,
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.n - 1 {
            let t = x[i + 1] - x[i] * x[i];
            out[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
            out[i + 1] += 200.0 * t;
        }
    }
}

/// `½ Σ d_i x_i²` with `d` log-spaced on `[1, QUADRATIC_CONDITION]`.
pub struct DiagonalQuadratic {
    diag: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn ill_conditioned(n: usize) -> Self {
        let diag = (0..n)
            .map(|i| QUADRATIC_CONDITION.powf(i as f64 / (n - 1) as f64))
            .collect();
        DiagonalQuadratic { diag }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }
}

impl Objective for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().zip(&self.diag).map(|(v, d)| d * v * v).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, v), d) in out.iter_mut().zip(x).zip(&self.diag) {
            *o = d * v;
        }
    }
}

/// `Σ x_i² + A (1 − cos 2π x_i)`, smooth and highly multimodal.
pub struct Rastrigin {
    n: usize,
}

impl Objective for Rastrigin {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .map(|v| v * v + RASTRIGIN_AMPLITUDE * (1.0 - (2.0 * PI * v).cos()))
            .sum()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = 2.0 * v + 2.0 * PI * RASTRIGIN_AMPLITUDE * (2.0 * PI * v).sin();
        }
    }
}
