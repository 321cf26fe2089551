//! SEIARB compartmental dynamics.
//!
//! Five human compartments (susceptible, exposed, symptomatic infected,
//! asymptomatic infected, recovered) plus the environmental viral
//! concentration `B`. Transmission happens through direct contact with
//! E, I and A, and indirectly through the environment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Population scale used by the default configuration; the recruitment rate
/// is defined relative to it.
pub const DEFAULT_POPULATION: f64 = 34_813_871.0;

/// Life expectancy (years) behind the natural mortality rate.
pub const LIFE_EXPECTANCY_YEARS: f64 = 74.87;

/// Rate constants of the model. All rates are per day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Recruitment rate (persons/day).
    pub lambda: f64,
    /// Natural mortality rate.
    pub d: f64,
    /// Contact rate between exposed and susceptible.
    pub beta1: f64,
    /// Contact rate between symptomatic infected and susceptible.
    pub beta2: f64,
    /// Contact rate between asymptomatic infected and susceptible.
    pub beta3: f64,
    /// Environment-to-susceptible transmission propensity.
    pub beta4: f64,
    /// Rate of leaving the exposed class.
    pub delta: f64,
    /// Fraction of exposed individuals that become asymptomatic.
    pub tau: f64,
    /// Disease-induced death rate of symptomatic infected.
    pub d1: f64,
    /// Recovery rate of symptomatic infected.
    pub gamma1: f64,
    /// Recovery rate of asymptomatic infected.
    pub gamma2: f64,
    /// Viral shedding into the environment by E, I and A.
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    /// Natural decay of virus in the environment.
    pub phi: f64,
}

impl ModelParams {
    /// Saudi Arabia calibration, with recruitment `d * population`.
    pub fn calibrated(population: f64) -> Self {
        let d = 1.0 / (LIFE_EXPECTANCY_YEARS * 365.0);
        Self {
            lambda: d * population,
            d,
            beta1: 0.1233,
            beta2: 0.0542,
            beta3: 0.0020,
            beta4: 0.1101,
            delta: 0.1980,
            tau: 0.3085,
            d1: 0.0104,
            gamma1: 0.3680,
            gamma2: 0.2945,
            psi1: 0.2574,
            psi2: 0.2798,
            psi3: 0.1584,
            phi: 0.3820,
        }
    }

    /// Exit rate from E.
    pub fn k1(&self) -> f64 {
        self.d + self.delta
    }

    /// Exit rate from I.
    pub fn k2(&self) -> f64 {
        self.gamma1 + self.d + self.d1
    }

    /// Exit rate from A.
    pub fn k3(&self) -> f64 {
        self.gamma2 + self.d
    }

    pub fn fields(&self) -> [(&'static str, f64); 15] {
        [
            ("lambda", self.lambda),
            ("d", self.d),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta3", self.beta3),
            ("beta4", self.beta4),
            ("delta", self.delta),
            ("tau", self.tau),
            ("d1", self.d1),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("psi1", self.psi1),
            ("psi2", self.psi2),
            ("psi3", self.psi3),
            ("phi", self.phi),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.fields() {
            if !value.is_finite() {
                return Err(Error::config(format!("model.{name}"), "must be finite"));
            }
            if value < 0.0 {
                return Err(Error::config(
                    format!("model.{name}"),
                    format!("must be nonnegative, got {value}"),
                ));
            }
        }
        if self.tau > 1.0 {
            return Err(Error::config("model.tau", "must lie in [0, 1]"));
        }
        if self.phi <= 0.0 {
            return Err(Error::config("model.phi", "must be positive"));
        }
        if self.d <= 0.0 {
            return Err(Error::config("model.d", "must be positive"));
        }
        for (name, k) in [("k1", self.k1()), ("k2", self.k2()), ("k3", self.k3())] {
            if k <= 0.0 {
                return Err(Error::config(
                    format!("model.{name}"),
                    "derived exit rate must be positive",
                ));
            }
        }
        Ok(())
    }
}

/// One time point of the six model states.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVec {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub a: f64,
    pub r: f64,
    /// Environmental viral concentration.
    pub b: f64,
}

impl StateVec {
    pub const NAMES: [&'static str; 6] = ["S", "E", "I", "A", "R", "B"];

    pub fn new(s: f64, e: f64, i: f64, a: f64, r: f64, b: f64) -> Self {
        Self { s, e, i, a, r, b }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.s, self.e, self.i, self.a, self.r, self.b]
    }

    pub fn from_array(x: [f64; 6]) -> Self {
        Self::new(x[0], x[1], x[2], x[3], x[4], x[5])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Total living population S+E+I+A+R; the viral concentration is excluded.
pub fn total_population(state: &StateVec) -> f64 {
    state.s + state.e + state.i + state.a + state.r
}

/// Control intensities: social distancing, surface hygiene, protective
/// measures by infected individuals, and fumigation of public spaces.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlVec {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub u4: f64,
}

impl ControlVec {
    pub const ZERO: ControlVec = ControlVec {
        u1: 0.0,
        u2: 0.0,
        u3: 0.0,
        u4: 0.0,
    };

    pub fn new(u1: f64, u2: f64, u3: f64, u4: f64) -> Self {
        Self { u1, u2, u3, u4 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.u1, self.u2, self.u3, self.u4]
    }

    pub fn from_array(u: [f64; 4]) -> Self {
        Self::new(u[0], u[1], u[2], u[3])
    }

    /// Rejects controls outside the unit box.
    pub fn check_admissible(&self) -> Result<()> {
        for (k, u) in self.to_array().into_iter().enumerate() {
            if !u.is_finite() || !(0.0..=1.0).contains(&u) {
                return Err(Error::Domain(format!(
                    "control u{} = {u} outside [0, 1]",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_state(state: &StateVec) -> Result<f64> {
    if !state.is_finite() {
        return Err(Error::Domain(format!("non-finite state {state:?}")));
    }
    let n = total_population(state);
    if n <= 0.0 {
        return Err(Error::ZeroPopulation {
            population: n,
            location: None,
        });
    }
    Ok(n)
}

/// Force-of-infection pieces shared by the dynamics, the Hamiltonian and
/// the metrics: direct contact `β1E+β2I+β3A` and environmental `β4B`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Contacts {
    pub direct: f64,
    pub environmental: f64,
}

impl Contacts {
    pub fn new(state: &StateVec, p: &ModelParams) -> Self {
        Self {
            direct: p.beta1 * state.e + p.beta2 * state.i + p.beta3 * state.a,
            environmental: p.beta4 * state.b,
        }
    }

    /// New infections per day under the given control, with `N` precomputed.
    pub fn incidence(&self, u: &ControlVec, s: f64, n: f64) -> f64 {
        (1.0 - u.u1) * self.direct * s / n + (1.0 - u.u1 - u.u2) * self.environmental * s / n
    }
}

pub(crate) fn derivative(state: &StateVec, u: &ControlVec, p: &ModelParams, n: f64) -> StateVec {
    let contacts = Contacts::new(state, p);
    let incidence = contacts.incidence(u, state.s, n);
    let shedding = p.psi1 * state.e + p.psi2 * state.i + p.psi3 * state.a;
    StateVec {
        s: p.lambda - incidence - p.d * state.s,
        e: incidence - (p.delta + p.d) * state.e,
        i: (1.0 - p.tau) * p.delta * state.e - (p.d + p.d1 + p.gamma1) * state.i,
        a: p.tau * p.delta * state.e - (p.d + p.gamma2) * state.a,
        r: p.gamma1 * state.i + p.gamma2 * state.a - p.d * state.r,
        b: (1.0 - u.u3) * shedding - (u.u4 + p.phi) * state.b,
    }
}

/// Time derivative of the uncontrolled model.
pub fn rhs_autonomous(state: &StateVec, params: &ModelParams) -> Result<StateVec> {
    let n = check_state(state)?;
    Ok(derivative(state, &ControlVec::ZERO, params, n))
}

/// Time derivative under the four controls. Distancing scales all contact
/// terms, hygiene scales only the environmental route, protective measures
/// scale shedding and fumigation adds to viral removal.
pub fn rhs_controlled(
    state: &StateVec,
    control: &ControlVec,
    params: &ModelParams,
) -> Result<StateVec> {
    control.check_admissible()?;
    let n = check_state(state)?;
    Ok(derivative(state, control, params, n))
}

/// Closed-form basic reproduction number.
pub fn compute_r0(params: &ModelParams) -> Result<f64> {
    let p = params;
    let (k1, k2, k3) = (p.k1(), p.k2(), p.k3());
    let denom = k1 * k2 * k3 * p.phi;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::SingularParameters(format!(
            "k1*k2*k3*phi = {denom}"
        )));
    }
    let numer = k2
        * (p.delta * p.tau * (p.beta4 * p.psi3 + p.beta3 * p.phi)
            + k3 * (p.beta4 * p.psi1 + p.beta1 * p.phi))
        + p.delta * k3 * (1.0 - p.tau) * (p.beta4 * p.psi2 + p.beta2 * p.phi);
    Ok(numer / denom)
}
