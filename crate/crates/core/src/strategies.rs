//! The fourteen intervention strategies: every nonempty combination of the
//! four controls, grouped by how many controls are combined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ControlVec;

/// Which of (u1, u2, u3, u4) may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ControlMask(pub [bool; 4]);

impl ControlMask {
    pub const NONE: ControlMask = ControlMask([false; 4]);
    pub const ALL: ControlMask = ControlMask([true; 4]);

    pub fn is_active(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Zeroes inactive channels and passes active ones through.
    pub fn apply(&self, control: &ControlVec) -> ControlVec {
        let mut u = control.to_array();
        for (v, &on) in u.iter_mut().zip(&self.0) {
            if !on {
                *v = 0.0;
            }
        }
        ControlVec::from_array(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scenario {
    A,
    B,
    C,
    D,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::A, Scenario::B, Scenario::C, Scenario::D];

    /// Number of simultaneously active controls.
    pub fn arity(self) -> usize {
        match self {
            Scenario::A => 1,
            Scenario::B => 2,
            Scenario::C => 3,
            Scenario::D => 4,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::A => "implementation of single control",
            Scenario::B => "the use of double controls",
            Scenario::C => "the use of triple controls",
            Scenario::D => "implementation of quadruplet",
        }
    }

    pub fn strategies(self) -> impl Iterator<Item = &'static StrategyMask> {
        STRATEGIES.iter().filter(move |s| s.scenario == self)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Scenario::A => "A",
            Scenario::B => "B",
            Scenario::C => "C",
            Scenario::D => "D",
        };
        f.write_str(c)
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Scenario::A),
            "B" | "b" => Ok(Scenario::B),
            "C" | "c" => Ok(Scenario::C),
            "D" | "d" => Ok(Scenario::D),
            other => Err(Error::config("scenario", format!("unknown scenario {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrategyMask {
    pub id: u32,
    pub scenario: Scenario,
    pub active: ControlMask,
    pub label: &'static str,
}

const DISTANCING: &str = "practising physical or social distancing protocols";
const HYGIENE: &str =
    "practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents";
const SAFETY: &str = "practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals";
const FUMIGATION: &str = "fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres";

pub const CONTROL_LABELS: [&str; 4] = [DISTANCING, HYGIENE, SAFETY, FUMIGATION];

macro_rules! strategy {
    ($id:expr, $sc:ident, [$a:expr, $b:expr, $c:expr, $d:expr], $label:expr) => {
        StrategyMask {
            id: $id,
            scenario: Scenario::$sc,
            active: ControlMask([$a, $b, $c, $d]),
            label: $label,
        }
    };
}

const T: bool = true;
const F: bool = false;

pub static STRATEGIES: [StrategyMask; 14] = [
    strategy!(1, A, [T, F, F, F], "practising physical or social distancing protocols only"),
    strategy!(2, A, [F, T, F, F], "practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents only"),
    strategy!(3, A, [F, F, T, F], "practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals only"),
    strategy!(4, A, [F, F, F, T], "fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres only"),
    strategy!(5, B, [T, T, F, F], "practising physical or social distancing protocols + practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents"),
    strategy!(6, B, [T, F, T, F], "practising physical or social distancing protocols + practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals"),
    strategy!(7, B, [T, F, F, T], "practising physical or social distancing protocols + fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres"),
    strategy!(8, B, [F, T, T, F], "practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents + practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals"),
    strategy!(9, B, [F, T, F, T], "practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents + fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres"),
    strategy!(10, B, [F, F, T, T], "practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals + fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres"),
    strategy!(11, C, [T, T, T, F], "practising physical or social distancing protocols + practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents + practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals"),
    strategy!(12, C, [T, T, F, T], "practising physical or social distancing protocols + practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents + fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres"),
    strategy!(13, C, [F, T, T, T], "practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents + practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals + fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres"),
    strategy!(14, D, [T, T, T, T], "practising physical or social distancing protocols + practising personal hygiene by cleaning contaminated surfaces with alcohol based detergents + practising proper and safety measures by exposed, asymptomatic infected and symptomatic infected individuals + fumigating schools in all levels of education, sports facilities, commercial areas and religious worship centres"),
];

pub fn all_strategies() -> &'static [StrategyMask] {
    &STRATEGIES
}

pub fn strategy(id: u32) -> Result<&'static StrategyMask> {
    STRATEGIES
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::config("strategy", format!("no strategy with id {id} (valid: 1-14)")))
}

pub fn apply_mask(mask: &StrategyMask, control: &ControlVec) -> ControlVec {
    mask.active.apply(control)
}
