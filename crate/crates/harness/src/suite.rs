//! Instance generation and the suite runner.

use std::f64::consts::PI;

use ncg_core::classic::ClassicProblem;
use ncg_core::{
    generate_dataset, run_gradient_descent, run_restarted_ncg, run_semi_adaptive_gd, IterationRecord,
    LossKind, Objective, RegressionObjective, RunResult, SolverConfig, Status,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SolverSpec, Suite};
use crate::error::{HarnessError, Result};

/// Half-width of the box classic starting points are drawn from.
const CLASSIC_START_RADIUS: f64 = 2.0;

/// Starting-point policy, recorded in the output metadata.
pub fn x0_policy(suite: Suite) -> &'static str {
    match suite {
        Suite::Classic => "uniform in [-2, 2]^n from ChaCha8(seed_i)",
        _ => "zero vector",
    }
}

pub enum Problem {
    Regression(RegressionObjective),
    Classic(ClassicProblem, Box<dyn Objective>),
}

/// One suite member: its objective, starting point and known bounds.
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub problem: Problem,
    pub x0: Vec<f64>,
}

impl Instance {
    /// Instance `i` of the suite, seeded with `base_seed + i`.
    pub fn build(cfg: &ExperimentConfig, index: usize) -> Result<Self> {
        let seed = cfg.base_seed.wrapping_add(index as u64);
        let (problem, x0) = match cfg.suite {
            Suite::SmoothedBiweight | Suite::Tukey => {
                let data = generate_dataset(cfg.n, cfg.m, seed)?;
                let loss = match cfg.suite {
                    Suite::Tukey => LossKind::Tukey { c: cfg.tukey_c() },
                    _ => LossKind::SmoothedBiweight,
                };
                (Problem::Regression(RegressionObjective::new(data, loss)), vec![0.0; cfg.n])
            }
            Suite::Classic => {
                let kind = ClassicProblem::ALL[index % ClassicProblem::ALL.len()];
                let obj = kind.build(cfg.n)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x0 = (0..cfg.n)
                    .map(|_| rng.random_range(-CLASSIC_START_RADIUS..CLASSIC_START_RADIUS))
                    .collect();
                (Problem::Classic(kind, obj), x0)
            }
        };
        Ok(Instance {
            index,
            seed,
            problem,
            x0,
        })
    }

    pub fn objective(&self) -> &dyn Objective {
        match &self.problem {
            Problem::Regression(o) => o,
            Problem::Classic(_, o) => o.as_ref(),
        }
    }

    pub fn label(&self) -> String {
        match &self.problem {
            Problem::Regression(o) => format!("{:?}#{}", o.loss(), self.seed),
            Problem::Classic(k, _) => format!("{k}#{}", self.seed),
        }
    }

    /// Global Lipschitz bound of the gradient, when one is known.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        match &self.problem {
            Problem::Regression(o) => Some(o.lipschitz_bound()),
            Problem::Classic(ClassicProblem::ConvexQuadratic, _) => Some(ncg_core::classic::QUADRATIC_CONDITION),
            Problem::Classic(ClassicProblem::RastriginSmooth, _) => Some(2.0 + 4.0 * PI * PI * 10.0),
            Problem::Classic(ClassicProblem::Rosenbrock, _) => None,
        }
    }

    /// Every objective in the suites is nonnegative.
    pub fn f_low(&self) -> Option<f64> {
        Some(0.0)
    }
}

pub fn run_solver(spec: &SolverSpec, obj: &dyn Objective, x0: &[f64], config: &SolverConfig) -> ncg_core::Result<RunResult> {
    match spec {
        SolverSpec::SemiAdaptiveGd => run_semi_adaptive_gd(obj, x0, config),
        SolverSpec::ArmijoGd => run_gradient_descent(obj, x0, config),
        _ => run_restarted_ncg(obj, x0, config),
    }
}

/// One row of the long-format results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub instance: usize,
    pub solver: String,
    pub status: Status,
    pub iterations: usize,
    pub n_f: usize,
    pub n_g: usize,
    pub final_grad_norm: f64,
    /// Empty when the run evaluated no restart test.
    pub restart_pct: Option<f64>,
}

impl RunRow {
    pub fn from_result(instance: usize, solver: &str, r: &RunResult) -> Self {
        RunRow {
            instance,
            solver: solver.to_string(),
            status: r.status,
            iterations: r.iterations,
            n_f: r.n_f,
            n_g: r.n_g,
            final_grad_norm: r.final_grad_norm,
            restart_pct: r.restart_pct(),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub solver: String,
    pub solved: usize,
    pub instances: usize,
    /// Mean over runs that evaluated at least one restart test.
    pub avg_restart_pct: f64,
    pub mean_iterations: f64,
    pub mean_function_evals: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub solvers: Vec<String>,
    pub instances: usize,
    /// Instance-major: the run of solver `s` on instance `i` sits at
    /// `i * solvers.len() + s`.
    pub runs: Vec<RunRow>,
    pub stats: Vec<SolverStats>,
    #[serde(skip)]
    pub traces: Option<Vec<Vec<IterationRecord>>>,
}

impl SuiteSummary {
    /// Rebuilds a summary from long-format rows (any order).
    pub fn from_rows(mut rows: Vec<RunRow>) -> Self {
        let mut solvers: Vec<String> = Vec::new();
        for r in &rows {
            if !solvers.contains(&r.solver) {
                solvers.push(r.solver.clone());
            }
        }
        let pos = |s: &str| solvers.iter().position(|x| x == s).unwrap();
        rows.sort_by_key(|r| (r.instance, pos(&r.solver)));
        let mut instance_ids: Vec<usize> = rows.iter().map(|r| r.instance).collect();
        instance_ids.dedup();
        let stats = aggregate(&solvers, instance_ids.len(), &rows);
        SuiteSummary {
            instances: instance_ids.len(),
            stats,
            solvers,
            runs: rows,
            traces: None,
        }
    }

    pub fn run(&self, instance: usize, solver: usize) -> &RunRow {
        &self.runs[instance * self.solvers.len() + solver]
    }

    pub fn stats_for(&self, solver: &str) -> Option<&SolverStats> {
        self.stats.iter().find(|s| s.solver == solver)
    }
}

fn aggregate(solvers: &[String], instances: usize, runs: &[RunRow]) -> Vec<SolverStats> {
    solvers
        .iter()
        .map(|name| {
            let mine: Vec<&RunRow> = runs.iter().filter(|r| &r.solver == name).collect();
            let count = mine.len().max(1) as f64;
            let pcts: Vec<f64> = mine.iter().filter_map(|r| r.restart_pct).collect();
            SolverStats {
                solver: name.clone(),
                solved: mine.iter().filter(|r| r.converged()).count(),
                instances,
                avg_restart_pct: if pcts.is_empty() {
                    0.0
                } else {
                    pcts.iter().sum::<f64>() / pcts.len() as f64
                },
                mean_iterations: mine.iter().map(|r| r.iterations as f64).sum::<f64>() / count,
                mean_function_evals: mine.iter().map(|r| r.n_f as f64).sum::<f64>() / count,
            }
        })
        .collect()
}

type InstanceRuns = Vec<(RunRow, Option<Vec<IterationRecord>>)>;

fn run_instance(cfg: &ExperimentConfig, index: usize) -> Result<InstanceRuns> {
    let inst = Instance::build(cfg, index)?;
    let mut out = Vec::with_capacity(cfg.solvers.len());
    for spec in &cfg.solvers {
        let name = spec.to_string();
        let config = spec.solver_config(cfg);
        let row = match run_solver(spec, inst.objective(), &inst.x0, &config) {
            Ok(r) => {
                let row = RunRow::from_result(index, &name, &r);
                (row, cfg.traces.then_some(r.trace))
            }
            Err(e) => {
                log::warn!("instance {index}, {name}: {e}");
                let row = RunRow {
                    instance: index,
                    solver: name,
                    status: Status::LinesearchFailed,
                    iterations: 0,
                    n_f: 0,
                    n_g: 0,
                    final_grad_norm: f64::NAN,
                    restart_pct: None,
                };
                (row, cfg.traces.then(Vec::new))
            }
        };
        out.push(row);
    }
    Ok(out)
}

pub(crate) fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))
}

/// Runs every solver of the roster on every instance.
///
/// Instances are processed on a pool of `parallelism` workers; results are
/// reduced in instance order, so the summary does not depend on scheduling.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteSummary> {
    cfg.validate()?;
    let per_instance: Vec<Result<InstanceRuns>> = pool(cfg.parallelism)?.install(|| {
        (0..cfg.instances)
            .into_par_iter()
            .map(|i| run_instance(cfg, i))
            .collect()
    });
    let mut runs = Vec::with_capacity(cfg.instances * cfg.solvers.len());
    let mut traces = cfg.traces.then(Vec::new);
    for inst in per_instance {
        for (row, trace) in inst? {
            runs.push(row);
            if let (Some(all), Some(t)) = (traces.as_mut(), trace) {
                all.push(t);
            }
        }
    }
    let solvers: Vec<String> = cfg.solvers.iter().map(|s| s.to_string()).collect();
    let stats = aggregate(&solvers, cfg.instances, &runs);
    Ok(SuiteSummary {
        solvers,
        instances: cfg.instances,
        runs,
        stats,
        traces,
    })
}
