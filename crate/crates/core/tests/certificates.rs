//! Per-iteration certificates on regression instances under the unit warm
//! start, with the Lipschitz bound computed from the data.

use ncg_core::{
    certificate_check, generate_dataset, run_gradient_descent, run_restarted_ncg, BetaFormula, LossKind,
    RegressionObjective, SolverConfig, WarmStart,
};
use proptest::prelude::*;

fn unit(p: f64, beta: BetaFormula) -> SolverConfig {
    SolverConfig::restarted(p, beta).with_warm_start(WarmStart::Unit)
}

fn assert_clean(obj: &RegressionObjective, config: &SolverConfig, gd: bool) {
    let x0 = vec![0.0; obj.dataset().n];
    let run = if gd { run_gradient_descent(obj, &x0, config) } else { run_restarted_ncg(obj, &x0, config) }.unwrap();
    let rep = certificate_check(&run, config, Some(obj.lipschitz_bound()), Some(0.0));
    assert!(rep.step_checks_applicable);
    assert_eq!(rep.n_count + rep.r_count, run.iterations);
    assert_eq!(rep.iterations_within_k_epsilon, Some(true));
    assert_eq!(rep.evals_within_bound, Some(true));
    assert_eq!(rep.total_violations(), 0, "{rep:#?}");
}

#[test]
fn restarted_half_on_biweight_instance() {
    let obj = RegressionObjective::new(generate_dataset(30, 60, 0).unwrap(), LossKind::SmoothedBiweight);
    assert_clean(&obj, &unit(0.5, BetaFormula::PolakRibierePlus), false);
}

#[test]
fn armijo_gradient_descent_on_tukey_instance() {
    let obj = RegressionObjective::new(generate_dataset(30, 60, 3).unwrap(), LossKind::tukey());
    let config = SolverConfig::gradient_descent().with_warm_start(WarmStart::Unit);
    assert_clean(&obj, &config, true);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn bounds_hold_on_random_instances(
        seed in 0u64..10_000,
        p in prop::sample::select(vec![0.0, 0.5, 1.0]),
        beta in prop::sample::select(vec![
            BetaFormula::FletcherReeves,
            BetaFormula::PolakRibiere,
            BetaFormula::PolakRibierePlus,
            BetaFormula::HagerZhang,
        ]),
        tukey in any::<bool>(),
    ) {
        let loss = if tukey { LossKind::tukey() } else { LossKind::SmoothedBiweight };
        let obj = RegressionObjective::new(generate_dataset(10, 20, seed).unwrap(), loss);
        let config = SolverConfig { max_iterations: 2000, ..unit(p, beta) };
        assert_clean(&obj, &config, false);
    }
}
