//! First-order optimality system and the forward-backward sweep.
//!
//! The running cost is `A1 E + A2 I + A3 A + A4 B + ½ Σ Dk uk²`. The
//! adjoint equations are `λ' = -∂H/∂x`, derived term by term from the
//! Hamiltonian below, with `λ(T) = 0`. Because the controls enter the
//! Hamiltonian linearly (no u1·u2 cross term) plus a diagonal quadratic, the
//! pointwise minimizer over the box is the componentwise clamp of the
//! stationary point.
//!
//! Differences from the commonly printed form of this adjoint system:
//!
//! * the I row uses the exit rate `d + d1 + γ1` (not `δ + d1 + γ1`),
//! * the A row uses `d + γ2` (not `d1 + γ2`),
//! * the E row has `-(1-τ)δ λ3` (no extra λ2 factor),
//! * the R row carries the full force of infection, including `β4 B`,
//! * the B row is `-A4 - (λ2-λ1)(1-u1-u2) β4 S/N + (u4+φ) λ6`.
//!
//! The fumigation switching function is `λ6 B / D4`, which is what
//! `∂H/∂u4 = 0` gives; there is no extra factor φ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, total_population, Contacts, ControlVec, ModelParams, StateVec};
use crate::ode::{lerp, rk4_step};
use crate::quadrature::trapezoid_by;
use crate::strategies::ControlMask;

/// Costate, one entry per state in S, E, I, A, R, B order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AdjointVec {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub l6: f64,
}

impl AdjointVec {
    pub const ZERO: AdjointVec = AdjointVec {
        l1: 0.0,
        l2: 0.0,
        l3: 0.0,
        l4: 0.0,
        l5: 0.0,
        l6: 0.0,
    };

    pub fn to_array(self) -> [f64; 6] {
        [self.l1, self.l2, self.l3, self.l4, self.l5, self.l6]
    }

    pub fn from_array(x: [f64; 6]) -> Self {
        Self {
            l1: x[0],
            l2: x[1],
            l3: x[2],
            l4: x[3],
            l5: x[4],
            l6: x[5],
        }
    }
}

/// Weights of the objective functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveWeights {
    /// A1..A4: burden of E, I, A and B.
    pub burden: [f64; 4],
    /// D1..D4: quadratic cost factors of u1..u4.
    pub control_cost: [f64; 4],
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            burden: [1.0; 4],
            control_cost: [50.0, 50.0, 100.0, 200.0],
        }
    }
}

impl ObjectiveWeights {
    pub fn validate(&self) -> Result<()> {
        let named = self
            .burden
            .iter()
            .enumerate()
            .map(|(k, &w)| (format!("weights.burden[{k}]"), w))
            .chain(
                self.control_cost
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| (format!("weights.control_cost[{k}]"), w)),
            );
        for (field, w) in named {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::config(field, format!("must be positive and finite, got {w}")));
            }
        }
        Ok(())
    }

    /// State-burden part of the running cost.
    pub fn burden_rate(&self, x: &StateVec) -> f64 {
        let a = &self.burden;
        a[0] * x.e + a[1] * x.i + a[2] * x.a + a[3] * x.b
    }

    /// `½ Σ Dk uk²`.
    pub fn control_rate(&self, u: &ControlVec) -> f64 {
        let d = &self.control_cost;
        0.5 * (d[0] * u.u1 * u.u1 + d[1] * u.u2 * u.u2 + d[2] * u.u3 * u.u3 + d[3] * u.u4 * u.u4)
    }

    pub fn running_cost(&self, x: &StateVec, u: &ControlVec) -> f64 {
        self.burden_rate(x) + self.control_rate(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Horizon in days.
    pub t_final: f64,
    pub n_steps: usize,
    /// Weight of the new projected control in the convex update.
    pub relaxation: f64,
    /// Relative sup-norm change of the controls that ends the sweep.
    pub tol: f64,
    pub max_iters: usize,
    pub u_max: [f64; 4],
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_final: 120.0,
            n_steps: 1200,
            relaxation: 0.5,
            tol: 1e-9,
            max_iters: 2000,
            u_max: [0.5, 0.5, 0.75, 0.75],
        }
    }
}

impl SweepConfig {
    pub fn step(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::config("sweep.t_final", "must be positive and finite"));
        }
        if self.n_steps < 2 {
            return Err(Error::config("sweep.n_steps", "must be at least 2"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::config("sweep.tol", "must lie in (0, 1)"));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::config("sweep.relaxation", "must lie in (0, 1]"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("sweep.max_iters", "must be at least 1"));
        }
        for (k, &u) in self.u_max.iter().enumerate() {
            if !(u > 0.0 && u <= 1.0) {
                return Err(Error::config(
                    format!("sweep.u_max[{k}]"),
                    format!("must lie in (0, 1], got {u}"),
                ));
            }
        }
        // (1 - u1 - u2) multiplies the environmental infection route.
        if self.u_max[0] + self.u_max[1] > 1.0 {
            return Err(Error::config(
                "sweep.u_max",
                format!(
                    "u1_max + u2_max = {} exceeds 1; the environmental transmission factor would turn negative",
                    self.u_max[0] + self.u_max[1]
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDiagnostics {
    /// Relative control change of every iteration, in order.
    pub change_history: Vec<f64>,
    /// Smallest state component over the trajectory divided by N(0).
    pub min_state_fraction: f64,
}

impl SweepDiagnostics {
    pub fn final_change(&self) -> f64 {
        self.change_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Converged (or last) iterate of the sweep. All trajectories share the grid
/// `times[k] = k * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSolution {
    pub step: f64,
    pub times: Vec<f64>,
    pub states: Vec<StateVec>,
    pub adjoints: Vec<AdjointVec>,
    pub controls: Vec<ControlVec>,
    pub mask: ControlMask,
    /// Trapezoidal quadrature of the running cost.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: SweepDiagnostics,
}

impl OptimalSolution {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn same_grid(&self, other: &OptimalSolution) -> bool {
        self.len() == other.len() && self.step == other.step
    }
}

pub fn hamiltonian(
    state: &StateVec,
    adjoint: &AdjointVec,
    control: &ControlVec,
    weights: &ObjectiveWeights,
    params: &ModelParams,
) -> Result<f64> {
    let n = model::check_state(state)?;
    let dx = model::derivative(state, control, params, n).to_array();
    let h = weights.running_cost(state, control)
        + adjoint
            .to_array()
            .iter()
            .zip(dx)
            .map(|(l, f)| l * f)
            .sum::<f64>();
    if h.is_finite() {
        Ok(h)
    } else {
        Err(Error::NonFinite {
            what: "Hamiltonian",
            location: None,
        })
    }
}

/// `dλ/dt = -∂H/∂x`.
pub fn rhs_adjoint(
    state: &StateVec,
    adjoint: &AdjointVec,
    control: &ControlVec,
    weights: &ObjectiveWeights,
    params: &ModelParams,
) -> Result<AdjointVec> {
    let p = params;
    let n = model::check_state(state)?;
    let s = state.s;
    let u = control;
    let l = adjoint;
    let a = &weights.burden;

    let contacts = Contacts::new(state, p);
    let direct = 1.0 - u.u1;
    let environmental = 1.0 - u.u1 - u.u2;
    // incidence = force * S / N
    let force = direct * contacts.direct + environmental * contacts.environmental;
    let n2 = n * n;
    let others = state.e + state.i + state.a + state.r;

    // Partial derivatives of the incidence.
    let d_s = force * others / n2;
    let dilution = force * s / n2;
    let d_e = direct * p.beta1 * s / n - dilution;
    let d_i = direct * p.beta2 * s / n - dilution;
    let d_a = direct * p.beta3 * s / n - dilution;
    let d_r = -dilution;
    let d_b = environmental * p.beta4 * s / n;

    // H carries (λ2 - λ1) * incidence.
    let gain = l.l2 - l.l1;
    let shed = 1.0 - u.u3;

    let out = AdjointVec {
        l1: -gain * d_s + p.d * l.l1,
        l2: -a[0] - gain * d_e + p.k1() * l.l2
            - (1.0 - p.tau) * p.delta * l.l3
            - p.tau * p.delta * l.l4
            - shed * p.psi1 * l.l6,
        l3: -a[1] - gain * d_i + p.k2() * l.l3 - p.gamma1 * l.l5 - shed * p.psi2 * l.l6,
        l4: -a[2] - gain * d_a + p.k3() * l.l4 - p.gamma2 * l.l5 - shed * p.psi3 * l.l6,
        l5: -gain * d_r + p.d * l.l5,
        l6: -a[3] - gain * d_b + (u.u4 + p.phi) * l.l6,
    };
    if out.to_array().iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite {
            what: "adjoint derivative",
            location: None,
        })
    }
}

/// Unclamped stationary points θ of the Hamiltonian in each control.
pub fn switching_functions(
    state: &StateVec,
    adjoint: &AdjointVec,
    weights: &ObjectiveWeights,
    params: &ModelParams,
) -> Result<[f64; 4]> {
    let n = model::check_state(state)?;
    let p = params;
    let d = &weights.control_cost;
    let contacts = Contacts::new(state, p);
    let gain = adjoint.l2 - adjoint.l1;
    let shedding = p.psi1 * state.e + p.psi2 * state.i + p.psi3 * state.a;
    Ok([
        gain * (contacts.direct + contacts.environmental) * state.s / (d[0] * n),
        gain * contacts.environmental * state.s / (d[1] * n),
        adjoint.l6 * shedding / d[2],
        adjoint.l6 * state.b / d[3],
    ])
}

/// Pointwise minimizer of the Hamiltonian over `[0, u_max]`.
pub fn characterize_controls(
    state: &StateVec,
    adjoint: &AdjointVec,
    weights: &ObjectiveWeights,
    params: &ModelParams,
    u_max: &[f64; 4],
) -> Result<ControlVec> {
    let theta = switching_functions(state, adjoint, weights, params)?;
    let mut u = [0.0; 4];
    for k in 0..4 {
        u[k] = clamp_control(theta[k], u_max[k]);
    }
    Ok(ControlVec::from_array(u))
}

#[inline]
pub fn clamp_control(theta: f64, upper: f64) -> f64 {
    theta.max(0.0).min(upper)
}

fn lerp_state(a: &StateVec, b: &StateVec, frac: f64) -> StateVec {
    let (a, b) = (a.to_array(), b.to_array());
    StateVec::from_array(std::array::from_fn(|j| lerp(a[j], b[j], frac)))
}

fn lerp_control(a: &ControlVec, b: &ControlVec, frac: f64) -> ControlVec {
    let (a, b) = (a.to_array(), b.to_array());
    ControlVec::from_array(std::array::from_fn(|j| lerp(a[j], b[j], frac)))
}

/// RK4 of the controlled dynamics on the uniform grid, with controls
/// interpolated linearly inside each step.
pub fn forward_pass(
    params: &ModelParams,
    init: &StateVec,
    controls: &[ControlVec],
    h: f64,
) -> Result<Vec<StateVec>> {
    let mut states = Vec::with_capacity(controls.len());
    states.push(*init);
    let mut y = init.to_array();
    for k in 0..controls.len().saturating_sub(1) {
        y = rk4_step(&y, h, |frac, x| {
            let u = lerp_control(&controls[k], &controls[k + 1], frac);
            model::rhs_controlled(&StateVec::from_array(*x), &u, params).map(StateVec::to_array)
        })
        .map_err(|e| e.at(k))?;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "state",
                location: Some(k + 1),
            });
        }
        states.push(StateVec::from_array(y));
    }
    Ok(states)
}

/// Integrates the adjoint system from `λ(T) = 0` back to t = 0 with the same
/// RK4 scheme, interpolating the state and controls linearly between nodes.
pub fn backward_pass(
    params: &ModelParams,
    weights: &ObjectiveWeights,
    states: &[StateVec],
    controls: &[ControlVec],
    h: f64,
) -> Result<Vec<AdjointVec>> {
    let n = states.len();
    let mut adjoints = vec![AdjointVec::ZERO; n];
    let mut y = [0.0; 6];
    for k in (1..n).rev() {
        y = rk4_step(&y, -h, |frac, l| {
            let x = lerp_state(&states[k], &states[k - 1], frac);
            let u = lerp_control(&controls[k], &controls[k - 1], frac);
            rhs_adjoint(&x, &AdjointVec::from_array(*l), &u, weights, params)
                .map(AdjointVec::to_array)
        })
        .map_err(|e| e.at(k))?;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "adjoint",
                location: Some(k - 1),
            });
        }
        adjoints[k - 1] = AdjointVec::from_array(y);
    }
    Ok(adjoints)
}

/// Trapezoidal quadrature of the running cost over a trajectory.
pub fn objective(
    weights: &ObjectiveWeights,
    states: &[StateVec],
    controls: &[ControlVec],
    h: f64,
) -> f64 {
    trapezoid_by(h, states.len(), |k| weights.running_cost(&states[k], &controls[k]))
}

fn max_relative_change(old: &[ControlVec], new: &[ControlVec]) -> f64 {
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (o, n) in old.iter().zip(new) {
        for (a, b) in o.to_array().into_iter().zip(n.to_array()) {
            diff = diff.max((b - a).abs());
            scale = scale.max(b.abs());
        }
    }
    diff / scale.max(f64::EPSILON)
}

fn check_initial(init: &StateVec) -> Result<f64> {
    if !init.is_finite() || init.to_array().iter().any(|&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "initial state must be finite and nonnegative: {init:?}"
        )));
    }
    let n0 = total_population(init);
    if n0 <= 0.0 {
        return Err(Error::ZeroPopulation {
            population: n0,
            location: Some(0),
        });
    }
    Ok(n0)
}

/// Forward-backward sweep.
///
/// Starting from zero controls, each iteration integrates the state forward,
/// the adjoint backward, projects the switching functions onto the admissible
/// box (masked channels pinned to zero) and blends the projection with the
/// previous controls. The sweep stops when the relative sup-norm change of
/// the controls drops to `config.tol`, or after `config.max_iters`
/// iterations with `converged = false`. The returned state and adjoint are
/// recomputed under the returned controls.
pub fn fbs_solve(
    params: &ModelParams,
    weights: &ObjectiveWeights,
    init: &StateVec,
    mask: ControlMask,
    config: &SweepConfig,
) -> Result<OptimalSolution> {
    params.validate()?;
    weights.validate()?;
    config.validate()?;
    let n0 = check_initial(init)?;

    let h = config.step();
    let nodes = config.n_steps + 1;
    let r = config.relaxation;
    let mut controls = vec![ControlVec::ZERO; nodes];
    let mut history = Vec::new();
    let mut converged = false;
    let blow_up = |iteration: usize| {
        move |e: Error| Error::NumericBlowUp {
            iteration,
            source: Box::new(e),
        }
    };

    while history.len() < config.max_iters {
        let iteration = history.len() + 1;
        let states = forward_pass(params, init, &controls, h).map_err(blow_up(iteration))?;
        let adjoints =
            backward_pass(params, weights, &states, &controls, h).map_err(blow_up(iteration))?;
        let mut updated = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let proposal = mask.apply(
                &characterize_controls(&states[k], &adjoints[k], weights, params, &config.u_max)
                    .map_err(|e| blow_up(iteration)(e.at(k)))?,
            );
            let old = controls[k].to_array();
            let new = proposal.to_array();
            let blended: [f64; 4] = std::array::from_fn(|j| r * new[j] + (1.0 - r) * old[j]);
            updated.push(mask.apply(&ControlVec::from_array(blended)));
        }
        let change = max_relative_change(&controls, &updated);
        controls = updated;
        history.push(change);
        if change <= config.tol {
            converged = true;
            break;
        }
    }

    let iterations = history.len();
    let states = forward_pass(params, init, &controls, h).map_err(blow_up(iterations))?;
    let adjoints =
        backward_pass(params, weights, &states, &controls, h).map_err(blow_up(iterations))?;
    let objective = objective(weights, &states, &controls, h);
    let min_state_fraction = states
        .iter()
        .flat_map(|x| x.to_array())
        .fold(f64::INFINITY, f64::min)
        / n0;

    Ok(OptimalSolution {
        step: h,
        times: (0..nodes).map(|k| k as f64 * h).collect(),
        states,
        adjoints,
        controls,
        mask,
        objective,
        iterations,
        converged,
        diagnostics: SweepDiagnostics {
            change_history: history,
            min_state_fraction,
        },
    })
}
