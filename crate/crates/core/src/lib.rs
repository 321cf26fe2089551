//! Optimal control of an SEIARB COVID-19 transmission model.
//!
//! The crate solves a four-control optimal control problem (social distancing,
//! surface hygiene, protective measures by infected individuals, fumigation)
//! with a Runge-Kutta forward-backward sweep, and ranks the resulting
//! intervention strategies with infection-averted ratios, average and
//! incremental cost-effectiveness ratios.
//!
//! Module map:
//!
//! * [`model`] parameters, state, the autonomous and controlled dynamics, R0
//! * [`pmp`] Hamiltonian, adjoint system, control characterization, sweep solver
//! * [`strategies`] the fourteen control-activation masks grouped by scenario
//! * [`metrics`] costs, cumulative infections/recoveries, efficacy curves
//! * [`cea`] IAR, ACER, ICER ladders and dominance elimination
//! * [`config`] and [`runner`] configuration loading and batch orchestration

pub mod cea;
pub mod config;
pub mod error;
pub mod metrics;
pub mod model;
pub mod ode;
pub mod pmp;
pub mod quadrature;
pub mod runner;
pub mod strategies;

pub use error::{Error, Result};
pub use model::{ControlVec, ModelParams, StateVec};
pub use pmp::{AdjointVec, ObjectiveWeights, OptimalSolution, SweepConfig};
pub use strategies::{ControlMask, Scenario, StrategyMask};
