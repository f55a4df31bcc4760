//! Acceptance criteria for the library and harness.
//!
//! Runs every criterion, prints one `PASS`/`FAIL` line each and exits
//! nonzero if any failed. Thresholds are pinned constants below.

use std::fs;
use std::process::ExitCode;

use ncg_core::{BetaFormula, StopRule};
use ncg_harness::certify::certify_suite;
use ncg_harness::gradcheck::{run_gradcheck, GradcheckOptions};
use ncg_harness::output::{write_outputs, RUNS_CSV, SUMMARY_CSV};
use ncg_harness::{run_suite, ExperimentConfig, SolverSpec, Suite, SuiteSummary};

const INSTANCES: usize = 100;

const STANDARD_MAX_RESTART_PCT: f64 = 5.0;
const SB_NCG0_MIN_RESTART_PCT: f64 = 50.0;
const SB_NCG025_MIN_RESTART_PCT: f64 = 30.0;
const TB_NCG0_MIN_RESTART_PCT: f64 = 40.0;
const TB_NCG05_MAX_RESTART_PCT: f64 = 10.0;
const NEAR_STANDARD_PCT_POINTS: f64 = 3.0;

const FR_STANDARD_MAX_SOLVED_FRACTION: f64 = 0.20;
const FR_NCG1_OVER_NCG0_MIN_FRACTION: f64 = 0.20;

const HZ_STANDARD_MAX_RESTART_PCT: f64 = 0.1;
const HZ_HIGH_P_MAX_RESTART_PCT: f64 = 2.0;

const CERT_INSTANCES: usize = 20;

const GRAD_INSTANCES: usize = 10;
const GRAD_POINTS: usize = 100;
const GRAD_TOLERANCE: f64 = 1e-6;
const BOUNDARY_TOLERANCE: f64 = 1e-12;

const CLASSIC_INSTANCES: usize = 30;
const CLASSIC_N: usize = 10;
const CLASSIC_EPSILON: f64 = 1e-5;
const CLASSIC_SOLVE_RATE_POINTS: f64 = 0.10;

struct Verdict {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get())
}

fn roster() -> Vec<SolverSpec> {
    vec![
        SolverSpec::Standard,
        SolverSpec::Restarted(0.0),
        SolverSpec::Restarted(0.25),
        SolverSpec::Restarted(0.5),
        SolverSpec::Restarted(0.75),
        SolverSpec::Restarted(1.0),
    ]
}

fn regression(suite: Suite, beta: BetaFormula) -> ExperimentConfig {
    ExperimentConfig {
        instances: INSTANCES,
        parallelism: workers(),
        ..ExperimentConfig::regression(suite, beta, roster())
    }
}

fn pct(s: &SuiteSummary, solver: &str) -> f64 {
    s.stats_for(solver).expect("solver in roster").avg_restart_pct
}

fn solved(s: &SuiteSummary, solver: &str) -> usize {
    s.stats_for(solver).expect("solver in roster").solved
}

fn table(s: &SuiteSummary) -> String {
    s.stats
        .iter()
        .map(|st| format!("{} {}/{} {:.2}%", st.solver, st.solved, st.instances, st.avg_restart_pct))
        .collect::<Vec<_>>()
        .join("; ")
}

fn near_standard(s: &SuiteSummary, solvers: &[&str]) -> bool {
    let std = pct(s, "Standard NCG");
    solvers.iter().all(|p| (pct(s, p) - std).abs() <= NEAR_STANDARD_PCT_POINTS)
}

fn criterion_1() -> Verdict {
    let s = run_suite(&regression(Suite::SmoothedBiweight, BetaFormula::PolakRibierePlus)).unwrap();
    let all_solved = s.stats.iter().all(|st| st.solved == INSTANCES);
    let pass = all_solved
        && pct(&s, "Standard NCG") <= STANDARD_MAX_RESTART_PCT
        && pct(&s, "NCG(0)") >= SB_NCG0_MIN_RESTART_PCT
        && pct(&s, "NCG(0.25)") >= SB_NCG025_MIN_RESTART_PCT
        && near_standard(&s, &["NCG(0.5)", "NCG(0.75)", "NCG(1)"]);
    Verdict {
        id: 1,
        name: "smoothed biweight PRP+ restart trend",
        pass,
        detail: format!("all solved: {all_solved}; {}", table(&s)),
    }
}

fn criterion_2() -> Verdict {
    let s = run_suite(&regression(Suite::Tukey, BetaFormula::PolakRibierePlus)).unwrap();
    let all_solved = s.stats.iter().all(|st| st.solved == INSTANCES);
    let pass = all_solved
        && pct(&s, "Standard NCG") <= STANDARD_MAX_RESTART_PCT
        && pct(&s, "NCG(0)") >= TB_NCG0_MIN_RESTART_PCT
        && pct(&s, "NCG(0.5)") <= TB_NCG05_MAX_RESTART_PCT
        && near_standard(&s, &["NCG(0.75)", "NCG(1)"]);
    Verdict {
        id: 2,
        name: "Tukey PRP+ restart trend",
        pass,
        detail: format!("all solved: {all_solved}; {}", table(&s)),
    }
}

fn criterion_3() -> Verdict {
    let s = run_suite(&regression(Suite::SmoothedBiweight, BetaFormula::FletcherReeves)).unwrap();
    let n = INSTANCES as f64;
    let std = solved(&s, "Standard NCG") as f64 / n;
    let gain = (solved(&s, "NCG(1)") as f64 - solved(&s, "NCG(0)") as f64) / n;
    Verdict {
        id: 3,
        name: "smoothed biweight FR degradation",
        pass: std <= FR_STANDARD_MAX_SOLVED_FRACTION && gain >= FR_NCG1_OVER_NCG0_MIN_FRACTION,
        detail: format!("Standard solved {std:.2}; NCG(1) minus NCG(0) {gain:.2}; {}", table(&s)),
    }
}

fn criterion_4() -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for suite in [Suite::SmoothedBiweight, Suite::Tukey] {
        let s = run_suite(&regression(suite, BetaFormula::HagerZhang)).unwrap();
        pass &= pct(&s, "Standard NCG") <= HZ_STANDARD_MAX_RESTART_PCT;
        for p in ["NCG(0.5)", "NCG(0.75)", "NCG(1)"] {
            pass &= pct(&s, p) <= HZ_HIGH_P_MAX_RESTART_PCT;
        }
        detail.push(format!("{suite:?}: {}", table(&s)));
    }
    Verdict {
        id: 4,
        name: "HZ restart scarcity",
        pass,
        detail: detail.join(" | "),
    }
}

fn criterion_5() -> Verdict {
    let cfg = ExperimentConfig {
        instances: CERT_INSTANCES,
        parallelism: workers(),
        ..ExperimentConfig::regression(
            Suite::SmoothedBiweight,
            BetaFormula::PolakRibierePlus,
            vec![SolverSpec::Restarted(0.0), SolverSpec::Restarted(0.5), SolverSpec::Restarted(1.0)],
        )
    };
    let s = certify_suite(&cfg).unwrap();
    let mut incomplete = 0;
    let mut checks = [0usize; 7];
    for r in &s.runs {
        let Some(rep) = &r.report else {
            incomplete += 1;
            continue;
        };
        let complete = rep.step_checks_applicable
            && rep.direction_violations.is_some()
            && rep.iterations_within_k_epsilon.is_some()
            && rep.evals_within_bound.is_some();
        if !complete {
            incomplete += 1;
        }
        checks[0] += rep.armijo_violations;
        checks[1] += rep.direction_violations.unwrap_or(0);
        checks[2] += rep.decrease_n_violations.unwrap_or(0);
        checks[3] += rep.decrease_r_violations.unwrap_or(0);
        checks[4] += rep.backtrack_bound_violations.unwrap_or(0);
        checks[5] += usize::from(rep.iterations_within_k_epsilon == Some(false));
        checks[6] += usize::from(rep.evals_within_bound == Some(false));
    }
    let names = ["armijo", "direction", "decrease_n", "decrease_r", "backtracks", "k_epsilon", "eval_bound"];
    let detail = names
        .iter()
        .zip(checks)
        .map(|(n, c)| format!("{n} {c}"))
        .collect::<Vec<_>>()
        .join(", ");
    Verdict {
        id: 5,
        name: "certificate suite",
        pass: incomplete == 0 && checks.iter().all(|&c| c == 0) && !s.runs.is_empty(),
        detail: format!("{} runs, {incomplete} incomplete; violations: {detail}", s.runs.len()),
    }
}

fn criterion_6() -> Verdict {
    let rep = run_gradcheck(&GradcheckOptions {
        instances: GRAD_INSTANCES,
        points: GRAD_POINTS,
        tolerance: GRAD_TOLERANCE,
        ..Default::default()
    })
    .unwrap();
    let losses_ok = rep
        .losses
        .iter()
        .all(|l| l.failures == 0 && l.points == GRAD_INSTANCES * GRAD_POINTS);
    let boundary_ok =
        rep.boundary.max_value_gap <= BOUNDARY_TOLERANCE && rep.boundary.max_slope <= BOUNDARY_TOLERANCE;
    let detail = rep
        .losses
        .iter()
        .map(|l| format!("{} max error {:.2e}", l.loss, l.max_error))
        .chain([format!(
            "boundary value gap {:.2e}, slope {:.2e}",
            rep.boundary.max_value_gap, rep.boundary.max_slope
        )])
        .collect::<Vec<_>>()
        .join("; ");
    Verdict {
        id: 6,
        name: "gradient audit",
        pass: losses_ok && boundary_ok,
        detail,
    }
}

fn criterion_7() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in [1, 8] {
        let cfg = ExperimentConfig {
            instances: INSTANCES,
            parallelism: workers,
            output_dir: dir.path().join(format!("p{workers}")),
            ..ExperimentConfig::regression(Suite::SmoothedBiweight, BetaFormula::PolakRibierePlus, roster())
        };
        let s = run_suite(&cfg).unwrap();
        write_outputs(&cfg, &s).unwrap();
        let read = |name| fs::read(cfg.output_dir.join(name)).unwrap();
        files.push((read(SUMMARY_CSV), read(RUNS_CSV)));
    }
    let summary_same = files[0].0 == files[1].0;
    let runs_same = files[0].1 == files[1].1;
    Verdict {
        id: 7,
        name: "determinism across worker counts",
        pass: summary_same && runs_same,
        detail: format!("summary identical: {summary_same}; runs identical: {runs_same}"),
    }
}

fn criterion_8() -> Verdict {
    let cfg = ExperimentConfig {
        suite: Suite::Classic,
        instances: CLASSIC_INSTANCES,
        n: CLASSIC_N,
        m: 0,
        epsilon: CLASSIC_EPSILON,
        stop_rule: Some(StopRule::Relative),
        parallelism: workers(),
        ..ExperimentConfig::regression(
            Suite::Classic,
            BetaFormula::FletcherReeves,
            vec![
                SolverSpec::Standard,
                SolverSpec::Restarted(0.5),
                SolverSpec::Restarted(0.75),
                SolverSpec::Restarted(1.0),
            ],
        )
    };
    let s = run_suite(&cfg).unwrap();
    let rate = |name: &str| solved(&s, name) as f64 / CLASSIC_INSTANCES as f64;
    let std = rate("Standard NCG");
    let pass = ["NCG(0.5)", "NCG(0.75)", "NCG(1)"]
        .iter()
        .all(|p| (rate(p) - std).abs() <= CLASSIC_SOLVE_RATE_POINTS);
    Verdict {
        id: 8,
        name: "classic suite FR proximity",
        pass,
        detail: table(&s),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Verdict; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let mut failed = 0;
    for c in criteria {
        let v = c();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {} ({})", v.id, v.name, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
