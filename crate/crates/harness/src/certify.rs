//! Certificate audit of a suite: every Armijo-based solver is re-run with
//! the unit warm start and its trace checked against the complexity bounds.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use ncg_core::{certificate_check, CertificateReport, Status, WarmStart};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, SolverSpec};
use crate::error::Result;
use crate::suite::{pool, run_solver, Instance};

pub const CERTIFICATES_JSON: &str = "certificates.json";
pub const CERTIFICATES_CSV: &str = "certificates.csv";

#[derive(Debug, Clone, Serialize)]
pub struct CertifiedRun {
    pub instance: usize,
    pub solver: String,
    pub status: Status,
    pub iterations: usize,
    pub n_f: usize,
    /// `None` when the run itself could not be started.
    pub report: Option<CertificateReport>,
    pub error: Option<String>,
}

impl CertifiedRun {
    pub fn violations(&self) -> usize {
        self.report.as_ref().map_or(0, |r| r.total_violations())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifySummary {
    pub runs: Vec<CertifiedRun>,
    /// Solvers left out because they do not use the Armijo line search.
    pub skipped_solvers: Vec<String>,
}

impl CertifySummary {
    pub fn total_violations(&self) -> usize {
        self.runs.iter().map(CertifiedRun::violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0 && self.runs.iter().all(|r| r.error.is_none())
    }
}

fn certifiable(spec: &SolverSpec) -> bool {
    !matches!(spec, SolverSpec::SemiAdaptiveGd)
}

fn certify_instance(cfg: &ExperimentConfig, index: usize) -> Result<Vec<CertifiedRun>> {
    let inst = Instance::build(cfg, index)?;
    let l = inst.lipschitz_bound();
    let f_low = inst.f_low();
    let mut out = Vec::new();
    for spec in cfg.solvers.iter().filter(|s| certifiable(s)) {
        let config = spec.solver_config(cfg).with_warm_start(WarmStart::Unit);
        let solver = spec.to_string();
        let run = match run_solver(spec, inst.objective(), &inst.x0, &config) {
            Ok(r) => CertifiedRun {
                instance: index,
                solver,
                status: r.status,
                iterations: r.iterations,
                n_f: r.n_f,
                report: Some(certificate_check(&r, &config, l, f_low)),
                error: None,
            },
            Err(e) => CertifiedRun {
                instance: index,
                solver,
                status: Status::LinesearchFailed,
                iterations: 0,
                n_f: 0,
                report: None,
                error: Some(e.to_string()),
            },
        };
        out.push(run);
    }
    Ok(out)
}

/// Runs the audit over every instance of `cfg`.
pub fn certify_suite(cfg: &ExperimentConfig) -> Result<CertifySummary> {
    cfg.validate()?;
    for spec in cfg.solvers.iter().filter(|s| certifiable(s)) {
        spec.solver_config(cfg).validate_for_certificate()?;
    }
    let per_instance: Vec<Result<Vec<CertifiedRun>>> = pool(cfg.parallelism)?.install(|| {
        (0..cfg.instances)
            .into_par_iter()
            .map(|i| certify_instance(cfg, i))
            .collect()
    });
    let mut runs = Vec::new();
    for r in per_instance {
        runs.extend(r?);
    }
    let skipped_solvers = cfg
        .solvers
        .iter()
        .filter(|s| !certifiable(s))
        .map(|s| s.to_string())
        .collect();
    Ok(CertifySummary { runs, skipped_solvers })
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `certificates.json` (full reports) and `certificates.csv` (one
/// row per run) into the configured output directory.
pub fn write_certificates(cfg: &ExperimentConfig, summary: &CertifySummary) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.output_dir)?;
    let json = cfg.output_dir.join(CERTIFICATES_JSON);
    let mut w = std::io::BufWriter::new(fs::File::create(&json)?);
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    w.flush()?;

    let csv_path = cfg.output_dir.join(CERTIFICATES_CSV);
    let mut out = csv::Writer::from_path(&csv_path)?;
    out.write_record([
        "instance",
        "solver",
        "status",
        "iterations",
        "n_f",
        "step_checks",
        "armijo",
        "direction",
        "decrease_n",
        "decrease_r",
        "backtracks",
        "f_low",
        "k_epsilon",
        "within_k_epsilon",
        "eval_bound",
        "within_eval_bound",
        "violations",
    ])?;
    for r in &summary.runs {
        let rep = r.report.as_ref();
        out.write_record([
            r.instance.to_string(),
            r.solver.clone(),
            r.status.label().to_string(),
            r.iterations.to_string(),
            r.n_f.to_string(),
            cell(rep.map(|x| x.step_checks_applicable)),
            cell(rep.map(|x| x.armijo_violations)),
            cell(rep.and_then(|x| x.direction_violations)),
            cell(rep.and_then(|x| x.decrease_n_violations)),
            cell(rep.and_then(|x| x.decrease_r_violations)),
            cell(rep.and_then(|x| x.backtrack_bound_violations)),
            cell(rep.and_then(|x| x.f_low_violations)),
            cell(rep.and_then(|x| x.k_epsilon)),
            cell(rep.and_then(|x| x.iterations_within_k_epsilon)),
            cell(rep.and_then(|x| x.eval_bound)),
            cell(rep.and_then(|x| x.evals_within_bound)),
            r.violations().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(vec![json, csv_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;
    use ncg_core::BetaFormula;

    #[test]
    fn modified_roster_certifies_cleanly() {
        let cfg = ExperimentConfig {
            instances: 3,
            n: 6,
            m: 12,
            ..ExperimentConfig::regression(
                Suite::Tukey,
                BetaFormula::PolakRibierePlus,
                vec![
                    SolverSpec::Restarted(0.5),
                    SolverSpec::ArmijoGd,
                    SolverSpec::SemiAdaptiveGd,
                ],
            )
        };
        let s = certify_suite(&cfg).unwrap();
        assert_eq!(s.runs.len(), 6);
        assert_eq!(s.skipped_solvers, ["Semi-adaptive GD"]);
        for r in &s.runs {
            let rep = r.report.as_ref().unwrap();
            assert!(rep.step_checks_applicable);
            assert!(rep.passed(), "{r:?}");
        }
        assert!(s.passed());
    }
}
