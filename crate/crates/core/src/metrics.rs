//! Scalar outcomes of solved trajectories.
//!
//! "Infections" are counted as cumulative incidence: the integral of the
//! inflow into the exposed class. Prevalence sums would count one infection
//! once per day it lasts, so infections averted would not be additive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{total_population, Contacts, ModelParams, StateVec};
use crate::pmp::{ObjectiveWeights, OptimalSolution};
use crate::quadrature::trapezoid_by;

/// Level at which an efficacy curve counts as saturated for
/// [`OutcomeSummary::time_to_efficacy_1`].
pub const EFFICACY_SATURATION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub strategy_id: Option<u32>,
    /// Baseline cumulative infections minus those under the strategy.
    /// Negative values are reported as they are.
    pub infections_averted: f64,
    pub total_cost: f64,
    pub recoveries: f64,
    pub objective_j: f64,
    pub peak_i: f64,
    /// First day on which all four efficacy curves reach
    /// [`EFFICACY_SATURATION`].
    pub time_to_efficacy_1: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Implementation cost `½ ∫ Σ Dk uk² dt`.
pub fn control_cost(solution: &OptimalSolution, weights: &ObjectiveWeights) -> f64 {
    trapezoid_by(solution.step, solution.len(), |k| {
        weights.control_rate(&solution.controls[k])
    })
}

/// State-burden part of the objective, `∫ (A1 E + A2 I + A3 A + A4 B) dt`.
pub fn burden(solution: &OptimalSolution, weights: &ObjectiveWeights) -> f64 {
    trapezoid_by(solution.step, solution.len(), |k| {
        weights.burden_rate(&solution.states[k])
    })
}

fn incidence_at(solution: &OptimalSolution, params: &ModelParams, k: usize) -> Result<f64> {
    let x = &solution.states[k];
    let n = total_population(x);
    if n <= 0.0 {
        return Err(Error::ZeroPopulation {
            population: n,
            location: Some(k),
        });
    }
    Ok(Contacts::new(x, params).incidence(&solution.controls[k], x.s, n))
}

/// Cumulative new infections (inflow into E) over the horizon.
pub fn cumulative_infections(solution: &OptimalSolution, params: &ModelParams) -> Result<f64> {
    let rates = (0..solution.len())
        .map(|k| incidence_at(solution, params, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(trapezoid_by(solution.step, rates.len(), |k| rates[k]))
}

/// Cumulative recoveries `∫ (γ1 I + γ2 A) dt`.
pub fn cumulative_recoveries(solution: &OptimalSolution, params: &ModelParams) -> f64 {
    trapezoid_by(solution.step, solution.len(), |k| {
        let x = &solution.states[k];
        params.gamma1 * x.i + params.gamma2 * x.a
    })
}

/// Relative reduction `(X(0) - X(t)) / X(0)` of E, I, A and B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficacyCurves {
    pub exposed: Vec<f64>,
    pub infected: Vec<f64>,
    pub asymptomatic: Vec<f64>,
    pub virus: Vec<f64>,
}

impl EfficacyCurves {
    pub fn columns(&self) -> [&[f64]; 4] {
        [&self.exposed, &self.infected, &self.asymptomatic, &self.virus]
    }
}

pub fn efficacy_curves(solution: &OptimalSolution, init: &StateVec) -> Result<EfficacyCurves> {
    let reference = [
        ("exposed", init.e),
        ("infected", init.i),
        ("asymptomatic", init.a),
        ("virus", init.b),
    ];
    for (name, v) in reference {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::ZeroInitialCompartment(name));
        }
    }
    let curve = |pick: fn(&StateVec) -> f64, x0: f64| -> Vec<f64> {
        solution.states.iter().map(|x| (x0 - pick(x)) / x0).collect()
    };
    Ok(EfficacyCurves {
        exposed: curve(|x| x.e, init.e),
        infected: curve(|x| x.i, init.i),
        asymptomatic: curve(|x| x.a, init.a),
        virus: curve(|x| x.b, init.b),
    })
}

fn saturation_time(solution: &OptimalSolution, curves: &EfficacyCurves) -> Option<f64> {
    let cols = curves.columns();
    (0..solution.len())
        .find(|&k| cols.iter().all(|c| c[k] >= EFFICACY_SATURATION))
        .map(|k| solution.times[k])
}

/// Aggregates the outcome of `solution` against the zero-control `baseline`.
pub fn summarize(
    solution: &OptimalSolution,
    baseline: &OptimalSolution,
    params: &ModelParams,
    weights: &ObjectiveWeights,
) -> Result<OutcomeSummary> {
    if !solution.same_grid(baseline) {
        return Err(Error::GridMismatch(format!(
            "{} nodes (h = {}) vs baseline {} nodes (h = {})",
            solution.len(),
            solution.step,
            baseline.len(),
            baseline.step
        )));
    }
    if solution.states.first() != baseline.states.first() {
        return Err(Error::GridMismatch(
            "solution and baseline start from different initial states".into(),
        ));
    }
    let averted = cumulative_infections(baseline, params)? - cumulative_infections(solution, params)?;
    let time_to_efficacy_1 = match solution.states.first() {
        Some(init) => efficacy_curves(solution, init)
            .ok()
            .and_then(|c| saturation_time(solution, &c)),
        None => None,
    };
    Ok(OutcomeSummary {
        strategy_id: None,
        infections_averted: averted,
        total_cost: control_cost(solution, weights),
        recoveries: cumulative_recoveries(solution, params),
        objective_j: solution.objective,
        peak_i: solution.states.iter().map(|x| x.i).fold(0.0, f64::max),
        time_to_efficacy_1,
        converged: solution.converged,
        iterations: solution.iterations,
    })
}
