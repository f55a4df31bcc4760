//! Data profiles and Dolan–Moré performance profiles.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::suite::{RunRow, SuiteSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Iterations,
    FunctionEvals,
}

impl Metric {
    /// Metric value of a run; zero counts are lifted to one so that ratios
    /// stay finite.
    fn of(&self, r: &RunRow) -> f64 {
        let v = match self {
            Metric::Iterations => r.iterations,
            Metric::FunctionEvals => r.n_f,
        };
        v.max(1) as f64
    }
}

impl FromStr for Metric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "iterations" | "iters" => Ok(Metric::Iterations),
            "function_evals" | "fevals" | "n_f" => Ok(Metric::FunctionEvals),
            _ => Err(HarnessError::Config(format!("unknown metric `{s}`"))),
        }
    }
}

/// Curves sampled on a shared axis: `curves[s][i]` is solver `s` at `axis[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub solvers: Vec<String>,
    pub axis: Vec<f64>,
    pub curves: Vec<Vec<f64>>,
}

impl Profile {
    pub fn curve(&self, solver: &str) -> Option<&[f64]> {
        let i = self.solvers.iter().position(|s| s == solver)?;
        Some(&self.curves[i])
    }
}

/// `{1, 2, 5, 10, 20, 50, …}` below `budget`, then `budget` itself.
pub fn budget_grid(budget: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut decade = 1usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let b = m * decade;
            if b >= budget {
                break 'outer;
            }
            grid.push(b);
        }
        decade *= 10;
    }
    grid.push(budget);
    grid
}

/// `τ = 2^{i/4}` for `i = 0..=40`, covering `[1, 2^10]`.
pub fn tau_grid() -> Vec<f64> {
    (0..=40).map(|i| 2f64.powf(i as f64 / 4.0)).collect()
}

/// Fraction of instances each solver solved within `B` iterations, per `B`.
pub fn data_profile(summary: &SuiteSummary, budgets: &[usize]) -> Profile {
    let total = summary.instances.max(1) as f64;
    let curves = (0..summary.solvers.len())
        .map(|s| {
            budgets
                .iter()
                .map(|&b| {
                    (0..summary.instances)
                        .filter(|&i| {
                            let r = summary.run(i, s);
                            r.converged() && r.iterations <= b
                        })
                        .count() as f64
                        / total
                })
                .collect()
        })
        .collect();
    Profile {
        solvers: summary.solvers.clone(),
        axis: budgets.iter().map(|&b| b as f64).collect(),
        curves,
    }
}

/// Performance ratios `r_{p,s}`, `+∞` for unsolved runs; `ratios[i][s]`.
pub fn performance_ratios(summary: &SuiteSummary, metric: Metric) -> Vec<Vec<f64>> {
    let ns = summary.solvers.len();
    (0..summary.instances)
        .map(|i| {
            let vals: Vec<f64> = (0..ns)
                .map(|s| {
                    let r = summary.run(i, s);
                    if r.converged() {
                        metric.of(r)
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            let best = vals.iter().copied().fold(f64::INFINITY, f64::min);
            vals.iter()
                .map(|v| if v.is_finite() { v / best } else { f64::INFINITY })
                .collect()
        })
        .collect()
}

/// `ρ_s(τ)`: fraction of instances with `r_{p,s} ≤ τ`.
pub fn performance_profile(summary: &SuiteSummary, metric: Metric, taus: &[f64]) -> Profile {
    let ratios = performance_ratios(summary, metric);
    let total = summary.instances.max(1) as f64;
    let curves = (0..summary.solvers.len())
        .map(|s| {
            taus.iter()
                .map(|&t| ratios.iter().filter(|row| row[s] <= t).count() as f64 / total)
                .collect()
        })
        .collect();
    Profile {
        solvers: summary.solvers.clone(),
        axis: taus.to_vec(),
        curves,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ncg_core::Status;

    fn row(instance: usize, solver: &str, ok: bool, iterations: usize, n_f: usize) -> RunRow {
        RunRow {
            instance,
            solver: solver.into(),
            status: if ok { Status::Converged } else { Status::BudgetExhausted },
            iterations,
            n_f,
            n_g: iterations + 1,
            final_grad_norm: 0.0,
            restart_pct: None,
        }
    }

    fn nondecreasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[0] <= w[1])
    }

    #[test]
    fn grids() {
        assert_eq!(budget_grid(10_000), [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000]);
        assert_eq!(budget_grid(30), [1, 2, 5, 10, 20, 30]);
        assert_eq!(budget_grid(1), [1]);
        let t = tau_grid();
        assert_eq!(t[0], 1.0);
        assert_eq!(*t.last().unwrap(), 1024.0);
    }

    #[test]
    fn data_profile_endpoints() {
        let s = SuiteSummary::from_rows(vec![
            row(0, "a", true, 0, 1),
            row(1, "a", true, 7, 9),
            row(2, "a", false, 10, 20),
            row(3, "a", true, 3, 3),
        ]);
        let p = data_profile(&s, &[0, 1, 3, 5, 10]);
        assert_eq!(p.curves[0], [0.25, 0.25, 0.5, 0.5, 0.75]);
        assert_eq!(p.curves[0][4], s.stats[0].solved as f64 / 4.0);
        assert!(nondecreasing(&p.curves[0]));
    }

    #[test]
    fn single_solver_profile_is_one_at_unity() {
        let s = SuiteSummary::from_rows(vec![row(0, "a", true, 4, 5), row(1, "a", true, 0, 1)]);
        let p = performance_profile(&s, Metric::Iterations, &tau_grid());
        assert_eq!(p.curves[0][0], 1.0);
    }

    #[test]
    fn dominance() {
        let mut rows = Vec::new();
        for i in 0..5 {
            rows.push(row(i, "fast", true, 10, 12));
            rows.push(row(i, "slow", true, 15 + i, 30));
        }
        rows.push(row(5, "fast", true, 1, 2));
        rows.push(row(5, "slow", false, 100, 200));
        let s = SuiteSummary::from_rows(rows);
        for m in [Metric::Iterations, Metric::FunctionEvals] {
            let p = performance_profile(&s, m, &tau_grid());
            assert_eq!(p.curve("fast").unwrap()[0], 1.0);
            assert_eq!(p.curve("slow").unwrap()[0], 0.0);
            for c in &p.curves {
                assert!(nondecreasing(c));
                assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
            }
            // unsolved runs never enter: ρ(∞) is the solve fraction
            assert_eq!(*p.curve("slow").unwrap().last().unwrap(), 5.0 / 6.0);
        }
    }
}
