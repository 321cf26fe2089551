#![allow(dead_code)]

use nalgebra::Matrix4;
use proptest::prelude::*;
use seiarb::config::RunConfig;
use seiarb::{ControlVec, ModelParams, StateVec};

pub fn defaults() -> RunConfig {
    RunConfig::default()
}

/// Positive-rate parameter sets around the calibration scale.
pub fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        (1e-5f64..1e-2, 1.0f64..1e4),
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
        (0.01f64..1.0, 0.0f64..=1.0, 0.0f64..0.1),
        (0.01f64..1.0, 0.01f64..1.0),
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.01f64..1.0),
    )
        .prop_map(|((d, lambda), (b1, b2, b3, b4), (delta, tau, d1), (g1, g2), (p1, p2, p3, phi))| {
            ModelParams {
                lambda,
                d,
                beta1: b1,
                beta2: b2,
                beta3: b3,
                beta4: b4,
                delta,
                tau,
                d1,
                gamma1: g1,
                gamma2: g2,
                psi1: p1,
                psi2: p2,
                psi3: p3,
                phi,
            }
        })
}

pub fn state_strategy() -> impl Strategy<Value = StateVec> {
    (
        1e5f64..1e7,
        1.0f64..1e5,
        1.0f64..1e5,
        1.0f64..1e5,
        0.0f64..1e6,
        1.0f64..1e5,
    )
        .prop_map(|(s, e, i, a, r, b)| StateVec::new(s, e, i, a, r, b))
}

pub fn control_strategy() -> impl Strategy<Value = ControlVec> {
    (0.0f64..0.5, 0.0f64..0.5, 0.0f64..0.75, 0.0f64..0.75)
        .prop_map(|(a, b, c, d)| ControlVec::new(a, b, c, d))
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    let scale = got.abs().max(want.abs());
    if scale == 0.0 {
        0.0
    } else {
        (got - want).abs() / scale
    }
}

/// Spectral radius of F V^-1 over the infected subsystem (E, I, A, B) at the
/// disease-free equilibrium, where S/N = 1.
pub fn ngm_radius(p: &ModelParams) -> f64 {
    let (k1, k2, k3) = (p.delta + p.d, p.gamma1 + p.d + p.d1, p.gamma2 + p.d);
    let f = Matrix4::new(
        p.beta1, p.beta2, p.beta3, p.beta4, //
        0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0,
    );
    let v = Matrix4::new(
        k1, 0.0, 0.0, 0.0, //
        -(1.0 - p.tau) * p.delta, k2, 0.0, 0.0, //
        -p.tau * p.delta, 0.0, k3, 0.0, //
        -p.psi1, -p.psi2, -p.psi3, p.phi,
    );
    let ngm = f * v.try_inverse().expect("V is nonsingular");
    ngm.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Fourth-order central difference of `f` at `x`.
pub fn diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}
