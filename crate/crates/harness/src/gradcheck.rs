//! Finite-difference audit of the regression losses.

use ncg_core::{check_gradient, generate_dataset, LossKind, RegressionObjective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

/// Central-difference step.
const FD_STEP: f64 = 1e-6;

/// Points are drawn uniformly in a box of this half-width around the true
/// coefficients, so residuals fall on both sides of the Tukey threshold.
const POINT_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckOptions {
    pub instances: usize,
    pub points: usize,
    pub n: usize,
    pub m: usize,
    pub base_seed: u64,
    pub tolerance: f64,
    pub tukey_c: f64,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        GradcheckOptions {
            instances: 10,
            points: 100,
            n: 30,
            m: 60,
            base_seed: 0,
            tolerance: 1e-6,
            tukey_c: 6f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LossAudit {
    pub loss: String,
    pub points: usize,
    pub max_error: f64,
    pub failures: usize,
}

/// Value and slope gaps of the Tukey loss at `±c`, evaluated at `±c`
/// itself (inner branch) and at the next float outward (outer branch).
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryAudit {
    pub max_value_gap: f64,
    pub max_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckReport {
    pub options: GradcheckOptions,
    pub losses: Vec<LossAudit>,
    pub boundary: BoundaryAudit,
    pub boundary_tolerance: f64,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.losses.iter().all(|l| l.failures == 0)
            && self.boundary.max_value_gap <= self.boundary_tolerance
            && self.boundary.max_slope <= self.boundary_tolerance
    }
}

pub fn tukey_boundary(c: f64) -> BoundaryAudit {
    let loss = LossKind::Tukey { c };
    let target = c * c / 6.0;
    let mut gap = 0.0f64;
    let mut slope = 0.0f64;
    for t in [c, c.next_up(), -c, (-c).next_down()] {
        gap = gap.max((loss.value(t) - target).abs());
        slope = slope.max(loss.derivative(t).abs());
    }
    BoundaryAudit {
        max_value_gap: gap,
        max_slope: slope,
    }
}

pub fn run_gradcheck(opts: &GradcheckOptions) -> Result<GradcheckReport> {
    let kinds = [LossKind::SmoothedBiweight, LossKind::Tukey { c: opts.tukey_c }];
    let mut audits: Vec<LossAudit> = kinds
        .iter()
        .map(|k| LossAudit {
            loss: format!("{k:?}"),
            points: 0,
            max_error: 0.0,
            failures: 0,
        })
        .collect();
    for i in 0..opts.instances {
        let seed = opts.base_seed.wrapping_add(i as u64);
        let data = generate_dataset(opts.n, opts.m, seed)?;
        let z = data.intermediates.as_ref().map(|im| im.z.clone()).unwrap_or_else(|| vec![0.0; opts.n]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<f64>> = (0..opts.points)
            .map(|_| z.iter().map(|zj| zj + rng.random_range(-POINT_RADIUS..POINT_RADIUS)).collect())
            .collect();
        for (kind, audit) in kinds.iter().zip(audits.iter_mut()) {
            let obj = RegressionObjective::new(data.clone(), *kind);
            for x in &points {
                let err = check_gradient(&obj, x, FD_STEP);
                audit.points += 1;
                audit.max_error = audit.max_error.max(err);
                if !(err <= opts.tolerance) {
                    audit.failures += 1;
                }
            }
        }
    }
    Ok(GradcheckReport {
        boundary: tukey_boundary(opts.tukey_c),
        boundary_tolerance: 1e-12,
        options: opts.clone(),
        losses: audits,
    })
}
