//! Batch orchestration and output files.
//!
//! Layout of an output directory:
//!
//! ```text
//! baseline/trajectory.csv
//! strategy_NN/{trajectory,controls,efficacy}.csv
//! strategy_NN/summary.{json,csv}
//! summaries.csv                      (csv format)
//! cea_report.json                    (json format, batches and replays)
//! cea_tables.csv                     (csv format, batches and replays)
//! cea_report.txt                     (always, batches and replays)
//! ```
//!
//! Floats in CSV files use 10 significant digits in scientific notation.
//! The text report rounds to 5.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cea::{analyze, CeaAnalysis, CeaRecord, CeaReport};
use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::metrics::{efficacy_curves, summarize, EfficacyCurves, OutcomeSummary};
use crate::pmp::{fbs_solve, OptimalSolution};
use crate::strategies::{strategy, ControlMask};

#[derive(Debug, Clone)]
pub struct StrategyOutcome {
    pub strategy_id: u32,
    pub solution: OptimalSolution,
    pub summary: OutcomeSummary,
    pub efficacy: EfficacyCurves,
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub baseline: OptimalSolution,
    pub outcomes: Vec<StrategyOutcome>,
    /// Present when more than one strategy was solved.
    pub cea: Option<CeaAnalysis>,
}

impl BatchResult {
    pub fn all_converged(&self) -> bool {
        self.baseline.converged && self.outcomes.iter().all(|o| o.solution.converged)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    NotConverged,
}

pub fn solve_baseline(config: &RunConfig) -> Result<OptimalSolution> {
    fbs_solve(
        &config.params,
        &config.weights,
        &config.initial,
        ControlMask::NONE,
        &config.sweep,
    )
}

pub fn solve_strategy(
    config: &RunConfig,
    strategy_id: u32,
    baseline: &OptimalSolution,
) -> Result<StrategyOutcome> {
    let mask = strategy(strategy_id)?.active;
    let solution = fbs_solve(&config.params, &config.weights, &config.initial, mask, &config.sweep)?;
    let mut summary = summarize(&solution, baseline, &config.params, &config.weights)?;
    summary.strategy_id = Some(strategy_id);
    let efficacy = efficacy_curves(&solution, &config.initial)?;
    Ok(StrategyOutcome {
        strategy_id,
        solution,
        summary,
        efficacy,
    })
}

pub fn cea_records(outcomes: &[StrategyOutcome]) -> Vec<CeaRecord> {
    outcomes
        .iter()
        .map(|o| {
            CeaRecord::new(
                o.strategy_id,
                o.summary.infections_averted,
                o.summary.total_cost,
                o.summary.recoveries,
            )
        })
        .collect()
}

/// Validates the config, solves the baseline and every selected strategy
/// (in parallel), then runs the cost-effectiveness analysis.
pub fn run_batch(config: &RunConfig) -> Result<BatchResult> {
    config.validate()?;
    let baseline = solve_baseline(config)?;
    let outcomes = config
        .strategies
        .par_iter()
        .map(|&id| solve_strategy(config, id, &baseline))
        .collect::<Result<Vec<_>>>()?;
    let cea = if outcomes.len() > 1 {
        Some(analyze(&cea_records(&outcomes))?)
    } else {
        None
    };
    Ok(BatchResult {
        baseline,
        outcomes,
        cea,
    })
}

/// `run_batch` followed by writing every output file into `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<(BatchResult, RunStatus)> {
    let result = run_batch(config)?;
    write_batch(&result, &config.out_dir, config.format)?;
    let status = if result.all_converged() {
        RunStatus::Success
    } else {
        RunStatus::NotConverged
    };
    Ok((result, status))
}

fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_trajectory(path: &Path, solution: &OptimalSolution) -> Result<()> {
    let rows = solution.times.iter().zip(&solution.states).map(|(t, x)| {
        let mut row = vec![sci(*t)];
        row.extend(x.to_array().into_iter().map(sci));
        row
    });
    write_csv(path, &["t", "S", "E", "I", "A", "R", "B"], rows)
}

fn write_controls(path: &Path, solution: &OptimalSolution) -> Result<()> {
    let rows = solution.times.iter().zip(&solution.controls).map(|(t, u)| {
        let mut row = vec![sci(*t)];
        row.extend(u.to_array().into_iter().map(sci));
        row
    });
    write_csv(path, &["t", "u1", "u2", "u3", "u4"], rows)
}

fn write_efficacy(path: &Path, solution: &OptimalSolution, curves: &EfficacyCurves) -> Result<()> {
    let cols = curves.columns();
    let rows = solution.times.iter().enumerate().map(|(k, t)| {
        let mut row = vec![sci(*t)];
        row.extend(cols.iter().map(|c| sci(c[k])));
        row
    });
    write_csv(path, &["t", "E_E", "E_I", "E_A", "E_B"], rows)
}

const SUMMARY_HEADER: [&str; 9] = [
    "strategy_id",
    "infections_averted",
    "total_cost",
    "recoveries",
    "objective_j",
    "peak_i",
    "time_to_efficacy_1",
    "converged",
    "iterations",
];

fn summary_row(s: &OutcomeSummary) -> Vec<String> {
    vec![
        s.strategy_id.map(|id| id.to_string()).unwrap_or_default(),
        sci(s.infections_averted),
        sci(s.total_cost),
        sci(s.recoveries),
        sci(s.objective_j),
        sci(s.peak_i),
        sci_opt(s.time_to_efficacy_1),
        s.converged.to_string(),
        s.iterations.to_string(),
    ]
}

pub fn strategy_dir(out_dir: &Path, strategy_id: u32) -> PathBuf {
    out_dir.join(format!("strategy_{strategy_id:02}"))
}

pub fn write_batch(result: &BatchResult, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let base_dir = out_dir.join("baseline");
    fs::create_dir_all(&base_dir)?;
    let p = base_dir.join("trajectory.csv");
    write_trajectory(&p, &result.baseline)?;
    written.push(p);

    for o in &result.outcomes {
        let dir = strategy_dir(out_dir, o.strategy_id);
        fs::create_dir_all(&dir)?;
        let p = dir.join("trajectory.csv");
        write_trajectory(&p, &o.solution)?;
        written.push(p);
        let p = dir.join("controls.csv");
        write_controls(&p, &o.solution)?;
        written.push(p);
        let p = dir.join("efficacy.csv");
        write_efficacy(&p, &o.solution, &o.efficacy)?;
        written.push(p);
        if format.json() {
            let p = dir.join("summary.json");
            fs::write(&p, serde_json::to_string_pretty(&o.summary)? + "\n")?;
            written.push(p);
        }
        if format.csv() {
            let p = dir.join("summary.csv");
            write_csv(&p, &SUMMARY_HEADER, [summary_row(&o.summary)])?;
            written.push(p);
        }
    }
    if format.csv() && !result.outcomes.is_empty() {
        let p = out_dir.join("summaries.csv");
        write_csv(&p, &SUMMARY_HEADER, result.outcomes.iter().map(|o| summary_row(&o.summary)))?;
        written.push(p);
    }
    if let Some(cea) = &result.cea {
        written.extend(write_cea(cea, out_dir, format)?);
    }
    Ok(written)
}

/// Reads a summary file written by [`write_batch`].
pub fn read_summary(path: &Path) -> Result<OutcomeSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn groups(analysis: &CeaAnalysis) -> Vec<(String, &CeaReport)> {
    let mut g: Vec<(String, &CeaReport)> = analysis
        .scenarios
        .iter()
        .map(|s| (s.scenario.to_string(), &s.report))
        .collect();
    g.push(("overall".to_string(), &analysis.overall));
    g
}

const CEA_HEADER: [&str; 11] = [
    "group",
    "round",
    "strategy_id",
    "infections_averted",
    "total_cost",
    "recoveries",
    "iar",
    "acer",
    "icer",
    "eliminated",
    "reason",
];

fn cea_rows(analysis: &CeaAnalysis) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (name, report) in groups(analysis) {
        for (k, round) in report.rounds.iter().enumerate() {
            for e in &round.entries {
                let r = &e.record;
                let out = round.eliminated.filter(|x| x.strategy_id == r.strategy_id);
                rows.push(vec![
                    name.clone(),
                    (k + 1).to_string(),
                    r.strategy_id.to_string(),
                    sci(r.infections_averted),
                    sci(r.total_cost),
                    sci(r.recoveries),
                    sci_opt(r.iar),
                    sci_opt(r.acer),
                    sci_opt(e.icer),
                    out.is_some().to_string(),
                    out.map(|x| x.reason.as_str().to_string()).unwrap_or_default(),
                ]);
            }
        }
    }
    rows
}

fn short(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into())
}

/// Human-readable tables, one block per elimination round.
pub fn render_cea_text(analysis: &CeaAnalysis) -> String {
    let mut s = String::new();
    for (name, report) in groups(analysis) {
        let _ = writeln!(s, "== {name} ==");
        for (k, round) in report.rounds.iter().enumerate() {
            let _ = writeln!(s, "round {}", k + 1);
            let _ = writeln!(
                s,
                "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}",
                "strategy", "averted", "cost", "IAR", "ACER", "ICER"
            );
            for e in &round.entries {
                let r = &e.record;
                let _ = writeln!(
                    s,
                    "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    r.strategy_id,
                    short(Some(r.infections_averted)),
                    short(Some(r.total_cost)),
                    short(r.iar),
                    short(r.acer),
                    short(e.icer)
                );
            }
            match round.eliminated {
                Some(x) => {
                    let _ = writeln!(s, "eliminated: {} ({})", x.strategy_id, x.reason.as_str());
                }
                None => {
                    let _ = writeln!(s, "remaining: {}", report.winner);
                }
            }
        }
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" > ");
        let _ = writeln!(s, "IAR ranking: {}", join(&report.iar_ranking));
        let _ = writeln!(s, "ACER ranking: {}", join(&report.acer_ranking));
        let _ = writeln!(s, "winner: {}\n", report.winner);
    }
    s
}

pub fn write_cea(analysis: &CeaAnalysis, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    if format.json() {
        let p = out_dir.join("cea_report.json");
        fs::write(&p, serde_json::to_string_pretty(analysis)? + "\n")?;
        written.push(p);
    }
    if format.csv() {
        let p = out_dir.join("cea_tables.csv");
        write_csv(&p, &CEA_HEADER, cea_rows(analysis))?;
        written.push(p);
    }
    let p = out_dir.join("cea_report.txt");
    fs::write(&p, render_cea_text(analysis))?;
    written.push(p);
    Ok(written)
}

#[derive(Debug, Deserialize, Serialize)]
struct RecordRow {
    strategy_id: u32,
    infections_averted: f64,
    cost: f64,
    recoveries: f64,
}

const RECORD_HEADER: [&str; 4] = ["strategy_id", "infections_averted", "cost", "recoveries"];

/// Reads `strategy_id,infections_averted,cost,recoveries` rows.
pub fn read_records(path: &Path) -> Result<Vec<CeaRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::Records {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_records(file, path)
}

/// Like [`read_records`] for any reader; `source` only labels errors.
pub fn parse_records<R: std::io::Read>(input: R, source: &Path) -> Result<Vec<CeaRecord>> {
    let bad = |line: usize, message: String| Error::Records {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().ne(RECORD_HEADER) {
        return Err(bad(
            1,
            format!("expected header {}, got {}", RECORD_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut records: Vec<CeaRecord> = Vec::new();
    for row in reader.deserialize::<RecordRow>() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            bad(line, e.to_string())
        })?;
        let line = records.len() + 2;
        strategy(row.strategy_id).map_err(|e| bad(line, e.to_string()))?;
        for (name, v) in [
            ("infections_averted", row.infections_averted),
            ("cost", row.cost),
            ("recoveries", row.recoveries),
        ] {
            if !v.is_finite() {
                return Err(bad(line, format!("{name} is not finite")));
            }
        }
        if records.iter().any(|r| r.strategy_id == row.strategy_id) {
            return Err(bad(line, format!("duplicate strategy id {}", row.strategy_id)));
        }
        records.push(CeaRecord::new(row.strategy_id, row.infections_averted, row.cost, row.recoveries));
    }
    if records.is_empty() {
        return Err(bad(1, "no records".into()));
    }
    Ok(records)
}

/// Reads a records file, runs the per-scenario and overall eliminations and
/// writes the report files.
pub fn replay_cea(records_file: &Path, out_dir: &Path, format: OutputFormat) -> Result<CeaAnalysis> {
    let records = read_records(records_file)?;
    let analysis = analyze(&records)?;
    write_cea(&analysis, out_dir, format)?;
    Ok(analysis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("seiarb-runner-{}-{name}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let dir = tmp("malformed");
        let p = dir.join("r.csv");
        fs::write(&p, "strategy_id,infections_averted,cost,recoveries\n1,2.0,3.0,4.0\n2,abc,1.0,1.0\n").unwrap();
        match read_records(&p) {
            Err(Error::Records { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        fs::write(&p, "id,ia,cost,rec\n1,2,3,4\n").unwrap();
        assert!(matches!(read_records(&p), Err(Error::Records { line: 1, .. })));
        fs::write(&p, "strategy_id,infections_averted,cost,recoveries\n1,2,3,4\n1,2,3,4\n").unwrap();
        assert!(matches!(read_records(&p), Err(Error::Records { line: 3, .. })));
        fs::write(&p, "strategy_id,infections_averted,cost,recoveries\n").unwrap();
        assert!(read_records(&p).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn single_row_replay_is_trivial_winner() {
        let dir = tmp("single");
        let p = dir.join("r.csv");
        fs::write(&p, "strategy_id,infections_averted,cost,recoveries\n7,100.0,5.0,50.0\n").unwrap();
        let a = replay_cea(&p, &dir, OutputFormat::Both).unwrap();
        assert_eq!(a.overall.winner, 7);
        assert_eq!(a.scenarios.len(), 1);
        assert!(dir.join("cea_report.json").exists());
        assert!(dir.join("cea_tables.csv").exists());
        let text = fs::read_to_string(dir.join("cea_report.txt")).unwrap();
        assert!(text.contains("winner: 7"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn float_format_has_ten_significant_digits() {
        assert_eq!(sci(1.0), "1.000000000e0");
        assert_eq!(sci(-0.00123456789012), "-1.234567890e-3");
        assert_eq!(short(Some(9.750398946e-4)), "9.7504e-4");
        assert_eq!(short(None), "-");
    }
}
