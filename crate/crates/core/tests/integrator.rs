mod common;

use proptest::prelude::*;
use seiarb::model::{rhs_autonomous, total_population, ModelParams, DEFAULT_POPULATION};
use seiarb::ode::rk4_step;
use seiarb::pmp::forward_pass;
use seiarb::{ControlVec, StateVec};

fn terminal(p: &ModelParams, init: &StateVec, t_final: f64, n: usize) -> [f64; 6] {
    let controls = vec![ControlVec::ZERO; n + 1];
    let states = forward_pass(p, init, &controls, t_final / n as f64).unwrap();
    states[n].to_array()
}

fn max_diff(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Observed order from three step sizes h, h/2, h/4.
fn observed_order(p: &ModelParams, init: &StateVec, t_final: f64, n: usize) -> f64 {
    let coarse = terminal(p, init, t_final, n);
    let mid = terminal(p, init, t_final, 2 * n);
    let fine = terminal(p, init, t_final, 4 * n);
    (max_diff(&coarse, &mid) / max_diff(&mid, &fine)).log2()
}

#[test]
fn rk4_order_on_uncontrolled_system() {
    let c = common::defaults();
    let order = observed_order(&c.params, &c.initial, c.sweep.t_final, 150);
    assert!(order >= 3.5, "observed order {order}");
}

/// Co-integrates M' = Λ - dM - d1 I next to the model and compares M with
/// S+E+I+A+R.
fn balance_error(p: &ModelParams, init: &StateVec, t_final: f64, n: usize) -> f64 {
    let h = t_final / n as f64;
    let mut y = [0.0; 7];
    y[..6].copy_from_slice(&init.to_array());
    y[6] = total_population(init);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        y = rk4_step(&y, h, |_, z: &[f64; 7]| {
            let x = StateVec::from_array(z[..6].try_into().unwrap());
            let dx = rhs_autonomous(&x, p)?.to_array();
            let mut out = [0.0; 7];
            out[..6].copy_from_slice(&dx);
            out[6] = p.lambda - p.d * z[6] - p.d1 * z[2];
            Ok::<_, seiarb::Error>(out)
        })
        .unwrap();
        let n_now = y[0] + y[1] + y[2] + y[3] + y[4];
        worst = worst.max(common::rel_err(n_now, y[6]));
    }
    worst
}

#[test]
fn population_balance_under_refinement() {
    let c = common::defaults();
    for n in [150, 300, 600, 1200] {
        let err = balance_error(&c.params, &c.initial, c.sweep.t_final, n);
        assert!(err <= 1e-8, "n = {n}: {err:e}");
    }
}

#[test]
fn disease_free_equilibrium_is_fixed() {
    let p = ModelParams::calibrated(DEFAULT_POPULATION);
    let dfe = StateVec::new(DEFAULT_POPULATION, 0.0, 0.0, 0.0, 0.0, 0.0);
    let end = terminal(&p, &dfe, 120.0, 100);
    assert!(common::rel_err(end[0], DEFAULT_POPULATION) <= 1e-12);
    assert!(end[1..].iter().all(|&v| v == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_sum_is_population_balance(
        p in common::params_strategy(),
        x in common::state_strategy(),
    ) {
        let dx = rhs_autonomous(&x, &p).unwrap().to_array();
        let lhs: f64 = dx[..5].iter().sum();
        let rhs = p.lambda - p.d * total_population(&x) - p.d1 * x.i;
        let scale = p.lambda + p.d * total_population(&x) + p.d1 * x.i + dx[..5].iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn trajectories_stay_nonnegative(
        x in common::state_strategy(),
        u in common::control_strategy(),
    ) {
        let p = ModelParams::calibrated(DEFAULT_POPULATION);
        let n0 = total_population(&x);
        let controls = vec![u; 301];
        let states = forward_pass(&p, &x, &controls, 0.4).unwrap();
        for s in &states {
            prop_assert!(s.to_array().iter().all(|&v| v >= -1e-9 * n0));
        }
    }
}
