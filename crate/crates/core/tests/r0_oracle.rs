mod common;

use proptest::prelude::*;
use seiarb::model::{compute_r0, ModelParams, DEFAULT_POPULATION};

#[test]
fn calibrated_parameters() {
    let p = ModelParams::calibrated(DEFAULT_POPULATION);
    let closed = compute_r0(&p).unwrap();
    let oracle = common::ngm_radius(&p);
    assert!(common::rel_err(closed, oracle) <= 1e-8, "{closed} vs {oracle}");
    assert!((closed - 1.2934814832318724).abs() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_draws_match_next_generation_matrix(p in common::params_strategy()) {
        let closed = compute_r0(&p).unwrap();
        let oracle = common::ngm_radius(&p);
        prop_assert!(common::rel_err(closed, oracle) <= 1e-8, "{} vs {}", closed, oracle);
    }

    #[test]
    fn r0_scales_with_all_contact_rates(p in common::params_strategy(), c in 0.1f64..10.0) {
        let mut q = p;
        q.beta1 *= c;
        q.beta2 *= c;
        q.beta3 *= c;
        q.beta4 *= c;
        let r = compute_r0(&p).unwrap();
        prop_assert!(common::rel_err(compute_r0(&q).unwrap(), c * r) <= 1e-12);
    }
}
