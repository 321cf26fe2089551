//! Cost-effectiveness analysis: IAR, ACER and iterative ICER elimination.
//!
//! Survivors are ranked by infections averted (ascending). Each round builds
//! an ICER ladder against the do-nothing origin and the preceding survivor,
//! then removes one strategy: the one with the largest ICER. Strategies that
//! avert exactly as many infections as an earlier rung are not ICER-compared;
//! when only such ties are left competing, the costlier one is removed
//! (cost minimization).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::{strategy, Scenario};

/// Infections averted per recovered individual. Zero when nothing is averted.
pub fn iar(infections_averted: f64, recoveries: f64) -> Result<f64> {
    if infections_averted == 0.0 {
        return Ok(0.0);
    }
    if !(recoveries > 0.0) {
        return Err(Error::UndefinedMetric(format!(
            "IAR needs positive recoveries, got {recoveries}"
        )));
    }
    Ok(infections_averted / recoveries)
}

/// Cost per infection averted.
pub fn acer(total_cost: f64, infections_averted: f64) -> Result<f64> {
    if !(infections_averted > 0.0) {
        return Err(Error::UndefinedMetric(format!(
            "ACER needs positive infections averted, got {infections_averted}"
        )));
    }
    Ok(total_cost / infections_averted)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CeaRecord {
    pub strategy_id: u32,
    pub infections_averted: f64,
    pub total_cost: f64,
    pub recoveries: f64,
    pub iar: Option<f64>,
    pub acer: Option<f64>,
}

impl CeaRecord {
    pub fn new(strategy_id: u32, infections_averted: f64, total_cost: f64, recoveries: f64) -> Self {
        Self {
            strategy_id,
            infections_averted,
            total_cost,
            recoveries,
            iar: iar(infections_averted, recoveries).ok(),
            acer: acer(total_cost, infections_averted).ok(),
        }
    }

    fn check(&self) -> Result<()> {
        let id = self.strategy_id;
        for (name, v) in [
            ("infections averted", self.infections_averted),
            ("total cost", self.total_cost),
            ("recoveries", self.recoveries),
        ] {
            if !v.is_finite() {
                return Err(Error::Cea(format!("strategy {id}: {name} is not finite")));
            }
        }
        if !(self.infections_averted > 0.0) {
            return Err(Error::Cea(format!(
                "strategy {id} averts no infections ({}); it cannot enter the ICER ladder",
                self.infections_averted
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EliminationReason {
    /// Largest ICER on the ladder: more costly per extra infection averted.
    Dominated,
    /// Same infections averted as a cheaper strategy.
    CostMinimization,
}

impl EliminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            EliminationReason::Dominated => "dominated",
            EliminationReason::CostMinimization => "cost-minimization",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub strategy_id: u32,
    pub reason: EliminationReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub record: CeaRecord,
    /// `None` for a record tied on infections averted with the rung before it.
    pub icer: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcerStep {
    pub entries: Vec<LadderEntry>,
    pub eliminated: Option<Elimination>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeaReport {
    pub rounds: Vec<IcerStep>,
    pub winner: u32,
    /// Strategy ids by IAR, best (highest) first. Records without an IAR are
    /// left out.
    pub iar_ranking: Vec<u32>,
    /// Strategy ids by ACER, best (lowest) first.
    pub acer_ranking: Vec<u32>,
}

impl CeaReport {
    pub fn elimination_order(&self) -> Vec<u32> {
        self.rounds
            .iter()
            .filter_map(|r| r.eliminated.map(|e| e.strategy_id))
            .collect()
    }
}

fn ladder_order(a: &CeaRecord, b: &CeaRecord) -> Ordering {
    a.infections_averted
        .total_cmp(&b.infections_averted)
        .then(b.total_cost.total_cmp(&a.total_cost))
        .then(a.strategy_id.cmp(&b.strategy_id))
}

fn validate(records: &[CeaRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Cea("no records".into()));
    }
    let mut seen = HashSet::new();
    for r in records {
        r.check()?;
        if !seen.insert(r.strategy_id) {
            return Err(Error::Cea(format!("duplicate strategy id {}", r.strategy_id)));
        }
    }
    Ok(())
}

/// One ladder over `records` without choosing an elimination.
///
/// Records are sorted by infections averted; among equal values the costlier
/// record comes first, so it is the one carrying the ICER.
pub fn icer_ladder(records: &[CeaRecord]) -> Result<IcerStep> {
    validate(records)?;
    let mut sorted = records.to_vec();
    sorted.sort_by(ladder_order);
    let mut entries = Vec::with_capacity(sorted.len());
    let mut prev: Option<&CeaRecord> = None;
    for r in &sorted {
        let icer = match prev {
            None => Some(r.total_cost / r.infections_averted),
            Some(p) if p.infections_averted == r.infections_averted => None,
            Some(p) => Some(
                (r.total_cost - p.total_cost) / (r.infections_averted - p.infections_averted),
            ),
        };
        entries.push(LadderEntry { record: *r, icer });
        prev = Some(r);
    }
    Ok(IcerStep {
        entries,
        eliminated: None,
    })
}

fn choose_elimination(step: &IcerStep) -> Option<Elimination> {
    if step.entries.len() < 2 {
        return None;
    }
    let priced: Vec<(usize, f64)> = step
        .entries
        .iter()
        .enumerate()
        .filter_map(|(k, e)| e.icer.map(|v| (k, v)))
        .collect();
    if priced.len() >= 2 {
        let (k, _) = priced
            .iter()
            .copied()
            .fold(None::<(usize, f64)>, |best, (k, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((k, v)),
            })?;
        return Some(Elimination {
            strategy_id: step.entries[k].record.strategy_id,
            reason: EliminationReason::Dominated,
        });
    }
    // Only one rung left: the rest tie with it. Drop the costliest of the group.
    let costliest = step
        .entries
        .iter()
        .max_by(|a, b| {
            a.record
                .total_cost
                .total_cmp(&b.record.total_cost)
                .then(b.record.strategy_id.cmp(&a.record.strategy_id))
        })?;
    Some(Elimination {
        strategy_id: costliest.record.strategy_id,
        reason: EliminationReason::CostMinimization,
    })
}

fn rankings(records: &[CeaRecord]) -> (Vec<u32>, Vec<u32>) {
    let ranked = |key: fn(&CeaRecord) -> Option<f64>, descending: bool| -> Vec<u32> {
        let mut v: Vec<(f64, u32)> = records
            .iter()
            .filter_map(|r| key(r).map(|x| (x, r.strategy_id)))
            .collect();
        v.sort_by(|a, b| {
            let o = a.0.total_cmp(&b.0);
            (if descending { o.reverse() } else { o }).then(a.1.cmp(&b.1))
        });
        v.into_iter().map(|(_, id)| id).collect()
    };
    (ranked(|r| r.iar, true), ranked(|r| r.acer, false))
}

/// Runs elimination rounds until one strategy is left. The last round holds
/// the lone survivor and no elimination.
pub fn eliminate(records: &[CeaRecord]) -> Result<CeaReport> {
    validate(records)?;
    let (iar_ranking, acer_ranking) = rankings(records);
    let mut survivors = records.to_vec();
    let mut rounds = Vec::with_capacity(records.len());
    loop {
        let mut step = icer_ladder(&survivors)?;
        step.eliminated = choose_elimination(&step);
        let removed = step.eliminated;
        rounds.push(step);
        match removed {
            Some(e) => survivors.retain(|r| r.strategy_id != e.strategy_id),
            None => break,
        }
    }
    Ok(CeaReport {
        rounds,
        winner: survivors[0].strategy_id,
        iar_ranking,
        acer_ranking,
    })
}

/// Elimination across the winners of the individual scenarios.
pub fn cross_scenario_report(winners: &[CeaRecord]) -> Result<CeaReport> {
    eliminate(winners)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub report: CeaReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeaAnalysis {
    pub scenarios: Vec<ScenarioReport>,
    pub overall: CeaReport,
}

/// Groups records by scenario, eliminates within each group, then across the
/// group winners.
pub fn analyze(records: &[CeaRecord]) -> Result<CeaAnalysis> {
    validate(records)?;
    let mut groups: BTreeMap<Scenario, Vec<CeaRecord>> = BTreeMap::new();
    for r in records {
        let s = strategy(r.strategy_id)
            .map_err(|_| Error::Cea(format!("unknown strategy id {}", r.strategy_id)))?;
        groups.entry(s.scenario).or_default().push(*r);
    }
    let mut scenarios = Vec::with_capacity(groups.len());
    let mut winners = Vec::with_capacity(groups.len());
    for (scenario, group) in groups {
        let report = eliminate(&group)?;
        winners.extend(group.iter().find(|r| r.strategy_id == report.winner).copied());
        scenarios.push(ScenarioReport { scenario, report });
    }
    let overall = cross_scenario_report(&winners)?;
    Ok(CeaAnalysis { scenarios, overall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u32, ia: f64, cost: f64) -> CeaRecord {
        CeaRecord::new(id, ia, cost, ia)
    }

    fn scenario_a() -> Vec<CeaRecord> {
        vec![
            rec(1, 2.0679e6, 281.1135),
            rec(2, 1.6603e6, 1.4077e3),
            rec(3, 1.4423e6, 1.4063e3),
            rec(4, 1.8000e6, 2.8098e3),
        ]
    }

    fn scenario_b() -> Vec<CeaRecord> {
        vec![
            rec(5, 2.2265e6, 1.6871e3),
            rec(6, 2.1128e6, 1.3487e3),
            rec(7, 2.1751e6, 1.7708e3),
            rec(8, 1.9253e6, 2.8104e3),
            rec(9, 2.0684e6, 4.1495e3),
            rec(10, 1.9809e6, 4.1019e3),
        ]
    }

    fn close(got: f64, printed: f64, abs: f64) -> bool {
        (got - printed).abs() <= abs
    }

    #[test]
    fn iar_examples() {
        assert!(close(iar(2.0679e6, 1.30937e6).unwrap(), 1.5793, 5e-5));
        assert_eq!(iar(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(iar(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(iar(3.5e5, 3.5e5).unwrap(), 1.0);
        assert!(matches!(iar(1.0, 0.0), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn acer_examples() {
        assert!(close(acer(281.1135, 2.0679e6).unwrap(), 1.3594e-4, 5e-9));
        assert!(close(acer(1.4063e3, 1.4423e6).unwrap(), 9.75e-4, 1e-6));
        assert_eq!(acer(0.0, 10.0).unwrap(), 0.0);
        assert!(matches!(acer(1.0, 0.0), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn scenario_a_ladder_order_and_leading_icers() {
        let step = icer_ladder(&scenario_a()).unwrap();
        let ids: Vec<u32> = step.entries.iter().map(|e| e.record.strategy_id).collect();
        assert_eq!(ids, [3, 2, 4, 1]);
        let icer: Vec<f64> = step.entries.iter().map(|e| e.icer.unwrap()).collect();
        assert!(close(icer[0], 9.7504e-4, 1e-5));
        assert!(close(icer[1], 6.4220e-6, 5e-11));
        assert!(close(icer[2], 0.0100, 5e-5));
        // The first rung is the ACER of the cheapest-to-rank record.
        assert_eq!(Some(icer[0]), step.entries[0].record.acer);
    }

    #[test]
    fn scenario_b_ladder() {
        let step = icer_ladder(&scenario_b()).unwrap();
        let ids: Vec<u32> = step.entries.iter().map(|e| e.record.strategy_id).collect();
        assert_eq!(ids, [8, 10, 9, 6, 7, 5]);
        let printed = [0.0015, 0.0232, 5.4400e-4, -0.0631, 0.0068, -0.0016];
        let half_unit = [5e-5, 5e-5, 5e-9, 5e-5, 5e-5, 5e-5];
        for ((e, p), tol) in step.entries.iter().zip(printed).zip(half_unit) {
            assert!(close(e.icer.unwrap(), p, tol), "{} {:?}", e.record.strategy_id, e.icer);
        }
    }

    #[test]
    fn single_record_is_origin_comparison() {
        let step = icer_ladder(&[rec(9, 4.0, 2.0)]).unwrap();
        assert_eq!(step.entries[0].icer, Some(0.5));
        let report = eliminate(&[rec(9, 4.0, 2.0)]).unwrap();
        assert_eq!(report.winner, 9);
        assert_eq!(report.rounds.len(), 1);
        assert_eq!(report.rounds[0].eliminated, None);
    }

    #[test]
    fn scenario_a_elimination() {
        let report = eliminate(&scenario_a()).unwrap();
        assert_eq!(report.elimination_order(), [4, 3, 2]);
        assert_eq!(report.winner, 1);
        assert_eq!(report.rounds.len(), 4);
        assert_eq!(report.acer_ranking[0], 1);
    }

    #[test]
    fn scenario_b_elimination() {
        let report = eliminate(&scenario_b()).unwrap();
        assert_eq!(report.elimination_order(), [10, 9, 7, 5, 8]);
        assert_eq!(report.winner, 6);
    }

    #[test]
    fn scenario_c_tie_goes_to_cheaper() {
        let records = [
            rec(11, 2.2265e6, 2.2464e3),
            rec(12, 2.2265e6, 1.8726e3),
            rec(13, 2.1053e6, 5.0186e3),
        ];
        let report = eliminate(&records).unwrap();
        let first = &report.rounds[0];
        let ids: Vec<u32> = first.entries.iter().map(|e| e.record.strategy_id).collect();
        assert_eq!(ids, [13, 11, 12]);
        assert_eq!(first.entries[2].icer, None);
        assert!(close(first.entries[1].icer.unwrap(), -0.0229, 5e-5));
        assert_eq!(
            report.rounds[1].eliminated,
            Some(Elimination {
                strategy_id: 11,
                reason: EliminationReason::CostMinimization
            })
        );
        assert_eq!(report.elimination_order(), [13, 11]);
        assert_eq!(report.winner, 12);
    }

    #[test]
    fn overall_across_winners() {
        let winners = [
            rec(1, 2.0679e6, 281.1135),
            rec(6, 2.1128e6, 1.3487e3),
            rec(12, 2.2265e6, 1.8726e3),
            rec(14, 2.2265e6, 2.0437e3),
        ];
        let report = cross_scenario_report(&winners).unwrap();
        assert_eq!(report.elimination_order(), [6, 14, 12]);
        assert_eq!(report.winner, 1);
        let r0: Vec<Option<f64>> = report.rounds[0].entries.iter().map(|e| e.icer).collect();
        assert!(close(r0[1].unwrap(), 0.0238, 5e-5));
        assert!(close(r0[2].unwrap(), 0.0061, 5e-5));
        assert_eq!(r0[3], None);
    }

    #[test]
    fn analyze_groups_by_scenario() {
        let mut all = scenario_a();
        all.extend(scenario_b());
        let a = analyze(&all).unwrap();
        let winners: Vec<(Scenario, u32)> =
            a.scenarios.iter().map(|s| (s.scenario, s.report.winner)).collect();
        assert_eq!(winners, [(Scenario::A, 1), (Scenario::B, 6)]);
        assert_eq!(a.overall.winner, 1);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(eliminate(&[]), Err(Error::Cea(_))));
        assert!(eliminate(&[rec(1, 1.0, 1.0), rec(1, 2.0, 1.0)]).is_err());
        assert!(eliminate(&[rec(1, f64::NAN, 1.0)]).is_err());
        assert!(eliminate(&[rec(1, 0.0, 1.0)]).is_err());
        assert!(analyze(&[rec(99, 1.0, 1.0)]).is_err());
    }
}
