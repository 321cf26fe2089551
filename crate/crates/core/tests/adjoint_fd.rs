mod common;

use proptest::prelude::*;
use seiarb::model::{ModelParams, DEFAULT_POPULATION};
use seiarb::pmp::{hamiltonian, rhs_adjoint, switching_functions};
use seiarb::{AdjointVec, ControlVec, ObjectiveWeights, StateVec};

fn adjoint_strategy() -> impl Strategy<Value = AdjointVec> {
    prop::array::uniform6(-10.0f64..10.0).prop_map(AdjointVec::from_array)
}

fn grad_x(x: &StateVec, l: &AdjointVec, u: &ControlVec, w: &ObjectiveWeights, p: &ModelParams) -> [f64; 6] {
    let base = x.to_array();
    std::array::from_fn(|j| {
        let h = 1e-3 * base[j].abs().max(1.0);
        common::diff(
            |v| {
                let mut y = base;
                y[j] = v;
                hamiltonian(&StateVec::from_array(y), l, u, w, p).unwrap()
            },
            base[j],
            h,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn adjoint_is_negative_state_gradient(
        x in common::state_strategy(),
        l in adjoint_strategy(),
        u in common::control_strategy(),
    ) {
        let p = ModelParams::calibrated(DEFAULT_POPULATION);
        let w = ObjectiveWeights::default();
        let analytic = rhs_adjoint(&x, &l, &u, &w, &p).unwrap().to_array();
        let fd = grad_x(&x, &l, &u, &w, &p);
        for j in 0..6 {
            let err = common::rel_err(analytic[j], -fd[j]);
            prop_assert!(err <= 1e-6, "component {}: {} vs {} (rel {:e})", j, analytic[j], -fd[j], err);
        }
    }

    #[test]
    fn random_parameters_too(
        p in common::params_strategy(),
        x in common::state_strategy(),
        l in adjoint_strategy(),
        u in common::control_strategy(),
    ) {
        let w = ObjectiveWeights { burden: [1.0, 2.0, 0.5, 3.0], control_cost: [10.0, 20.0, 30.0, 40.0] };
        let analytic = rhs_adjoint(&x, &l, &u, &w, &p).unwrap().to_array();
        let fd = grad_x(&x, &l, &u, &w, &p);
        for j in 0..6 {
            prop_assert!(common::rel_err(analytic[j], -fd[j]) <= 1e-6, "component {}", j);
        }
    }

    /// The switching functions are the stationary points of H in u.
    #[test]
    fn switching_functions_zero_the_control_gradient(
        x in common::state_strategy(),
        l in adjoint_strategy(),
    ) {
        let p = ModelParams::calibrated(DEFAULT_POPULATION);
        let w = ObjectiveWeights::default();
        let theta = switching_functions(&x, &l, &w, &p).unwrap();
        let u = ControlVec::from_array(theta);
        let scale: f64 = hamiltonian(&x, &l, &ControlVec::ZERO, &w, &p).unwrap().abs().max(1.0);
        for k in 0..4 {
            let g = common::diff(
                |v| {
                    let mut a = theta;
                    a[k] = v;
                    hamiltonian(&x, &l, &ControlVec::from_array(a), &w, &p).unwrap()
                },
                u.to_array()[k],
                1e-3,
            );
            prop_assert!(g.abs() <= 1e-6 * scale, "u{}: dH/du = {}", k + 1, g);
        }
    }
}
