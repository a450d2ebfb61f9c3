//! Experiment grids over α and the rollout count.
//!
//! Each cell runs the planner once per seed `base_seed + i`. A run's cost is
//! its number of executed actions when it reaches the goal and the full
//! budget otherwise. Cells are compared against the α = 0 cell with the same
//! rollout count.

mod load;
pub mod stats;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::landmarks::LandmarkGraph;
use crate::model::Problem;
use crate::planner::{lamp, ConfigError, ExecutionStatus, LampConfig};

pub use load::{load_problem, LoadError};
pub use stats::{fisher_exact, welch_t_test, StatsError, ALPHA_STAT};

pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.2, 0.5, 0.8, 1.0];
pub const DEFAULT_ROLLOUTS: [u32; 10] = [5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000];
pub const DEFAULT_RUNS: u32 = 75;

pub const CSV_HEADER: &str =
    "alpha,n_rollouts,mean_cost,std_cost,success_rate,p_cost_vs_alpha0,p_success_vs_alpha0,runs";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0} list must not be empty")]
    EmptyGrid(&'static str),
    #[error("runs must be at least 1")]
    NoRuns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alphas: Vec<f64>,
    pub rollouts: Vec<u32>,
    pub runs: u32,
    pub base_seed: u64,
    /// Budget, depth, exploration and utility settings shared by all cells;
    /// its `alpha`, `n_rollouts` and `seed` are overridden per run.
    pub planner: LampConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alphas: DEFAULT_ALPHAS.to_vec(),
            rollouts: DEFAULT_ROLLOUTS.to_vec(),
            runs: DEFAULT_RUNS,
            base_seed: 0,
            planner: LampConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.alphas.is_empty() {
            return Err(HarnessError::EmptyGrid("alpha"));
        }
        if self.rollouts.is_empty() {
            return Err(HarnessError::EmptyGrid("n_rollouts"));
        }
        if self.runs == 0 {
            return Err(HarnessError::NoRuns);
        }
        for &alpha in &self.alphas {
            for &n in &self.rollouts {
                self.cell_config(alpha, n, 0).validate()?;
            }
        }
        Ok(())
    }

    pub fn cell_config(&self, alpha: f64, n_rollouts: u32, run: u32) -> LampConfig {
        LampConfig { alpha, n_rollouts, seed: self.base_seed.wrapping_add(run as u64), ..self.planner.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunRecord {
    pub seed: u64,
    pub status: ExecutionStatus,
    pub executed_actions: u32,
    /// The loop counter, landmark-selection iterations included.
    pub loop_cost: u32,
    /// Executed actions on success, the budget otherwise.
    pub cost: u32,
}

impl RunRecord {
    pub fn success(&self) -> bool {
        self.status == ExecutionStatus::Success
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub alpha: f64,
    pub n_rollouts: u32,
    pub mean_cost: f64,
    /// Sample standard deviation; `NaN` for a single run.
    pub std_cost: f64,
    pub success_rate: f64,
    /// Welch test on costs against the α = 0 cell; `NaN` if undefined.
    pub p_cost_vs_alpha0: f64,
    /// Fisher test on successes against the α = 0 cell; `NaN` if undefined.
    pub p_success_vs_alpha0: f64,
    pub records: Vec<RunRecord>,
}

impl CellStats {
    pub fn runs(&self) -> usize {
        self.records.len()
    }

    pub fn successes(&self) -> u64 {
        self.records.iter().filter(|r| r.success()).count() as u64
    }

    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cost as f64).collect()
    }

    fn from_records(alpha: f64, n_rollouts: u32, records: Vec<RunRecord>) -> Self {
        let costs: Vec<f64> = records.iter().map(|r| r.cost as f64).collect();
        let n = costs.len() as f64;
        let std_cost = if costs.len() < 2 { f64::NAN } else { stats::variance(&costs).sqrt() };
        let successes = records.iter().filter(|r| r.success()).count() as f64;
        CellStats {
            alpha,
            n_rollouts,
            mean_cost: stats::mean(&costs),
            std_cost,
            success_rate: successes / n,
            p_cost_vs_alpha0: f64::NAN,
            p_success_vs_alpha0: f64::NAN,
            records,
        }
    }
}

pub fn run_once(p: &Problem, lg: &LandmarkGraph, cfg: &LampConfig) -> Result<RunRecord, ConfigError> {
    let out = lamp(p, lg, cfg)?;
    let executed_actions = out.executed_cost();
    let cost = if out.is_success() { executed_actions } else { cfg.budget };
    Ok(RunRecord { seed: cfg.seed, status: out.status, executed_actions, loop_cost: out.cost, cost })
}

/// Runs every cell, α-major, rollout counts in the given order. Runs are
/// distributed over threads; results do not depend on scheduling.
pub fn run_grid(p: &Problem, lg: &LandmarkGraph, cfg: &ExperimentConfig) -> Result<Vec<CellStats>, HarnessError> {
    cfg.validate()?;
    let jobs: Vec<(f64, u32, u32)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| cfg.rollouts.iter().flat_map(move |&n| (0..cfg.runs).map(move |i| (a, n, i))))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(a, n, i)| run_once(p, lg, &cfg.cell_config(a, n, i)).expect("validated"))
        .collect();
    let per_cell = cfg.runs as usize;
    let mut cells: Vec<CellStats> = jobs
        .chunks(per_cell)
        .zip(records.chunks(per_cell))
        .map(|(j, r)| CellStats::from_records(j[0].0, j[0].1, r.to_vec()))
        .collect();
    compare_to_baseline(&mut cells);
    Ok(cells)
}

/// Fills the p-value columns from the α = 0 cell with equal rollout count.
pub fn compare_to_baseline(cells: &mut [CellStats]) {
    let baselines: Vec<(u32, Vec<f64>, u64, u64)> = cells
        .iter()
        .filter(|c| c.alpha == 0.0)
        .map(|c| (c.n_rollouts, c.costs(), c.successes(), c.runs() as u64))
        .collect();
    for c in cells.iter_mut() {
        let Some((_, costs, s0, n0)) = baselines.iter().find(|b| b.0 == c.n_rollouts) else { continue };
        c.p_cost_vs_alpha0 = welch_t_test(&c.costs(), costs).unwrap_or(f64::NAN);
        c.p_success_vs_alpha0 = fisher_exact(c.successes(), c.runs() as u64, *s0, *n0).unwrap_or(f64::NAN);
    }
}

/// `x` with 6 significant digits in the shortest of fixed or exponent
/// notation, trailing zeros removed; `NaN` for undefined values.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = format!("{x:.5e}");
    let (mant, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

pub fn to_csv(cells: &[CellStats]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in cells {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            sig6(c.alpha),
            c.n_rollouts,
            sig6(c.mean_cost),
            sig6(c.std_cost),
            sig6(c.success_rate),
            sig6(c.p_cost_vs_alpha0),
            sig6(c.p_success_vs_alpha0),
            c.runs()
        )
        .unwrap();
    }
    s
}

/// Long format for gnuplot: one block per α, separated by two blank lines,
/// each row `n_rollouts mean_cost std_cost success_rate`.
pub fn to_long(cells: &[CellStats]) -> String {
    let mut s = String::from("# alpha n_rollouts mean_cost std_cost success_rate\n");
    let mut last: Option<f64> = None;
    for c in cells {
        if last.is_some_and(|a| a != c.alpha) {
            s.push_str("\n\n");
        }
        last = Some(c.alpha);
        writeln!(
            s,
            "{} {} {} {} {}",
            sig6(c.alpha),
            c.n_rollouts,
            sig6(c.mean_cost),
            sig6(c.std_cost),
            sig6(c.success_rate)
        )
        .unwrap();
    }
    s
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

pub fn emit_csv(cells: &[CellStats], path: &Path) -> Result<(), HarnessError> {
    write(path, &to_csv(cells))
}

pub fn emit_long(cells: &[CellStats], path: &Path) -> Result<(), HarnessError> {
    write(path, &to_long(cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.2), "0.2");
        assert_eq!(sig6(62.8), "62.8");
        assert_eq!(sig6(149.0), "149");
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(200.0 / 3.0), "66.6667");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(2.75e-3), "0.00275");
        assert_eq!(sig6(1.5e-44), "1.5e-44");
        assert_eq!(sig6(f64::NAN), "NaN");
    }

    #[test]
    fn empty_grid_is_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }
}
