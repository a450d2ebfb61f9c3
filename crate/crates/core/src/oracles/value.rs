//! Exact dynamic programming over the reachable state space.

use rustc_hash::FxHashMap;

use super::{reachable_states, OracleError};
use crate::model::{ActionId, Problem, State};
use crate::planner::{gubs_utility, LampConfig};

const RESIDUAL: f64 = 1e-10;
const MAX_SWEEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Maximal probability of eventually reaching the goal.
    MaxGoalProb,
    /// Maximal expected `u(cost) + K_g [goal]`, where runs halt at the
    /// goal, at a state without actions, or after `cfg.budget` actions.
    ExpectedGubs,
}

#[derive(Debug, Clone)]
pub struct ValueTable {
    pub criterion: Criterion,
    pub states: Vec<State>,
    pub values: Vec<f64>,
    /// Greedy action per state (`None` at goals and dead ends). For the
    /// utility criterion this is the policy with no cost spent yet.
    pub policy: Vec<Option<ActionId>>,
    /// Action values at each state, aligned with `states`.
    pub q: Vec<Vec<(ActionId, f64)>>,
    pub residual: f64,
    index: FxHashMap<State, usize>,
}

impl ValueTable {
    pub fn value(&self, s: &State) -> Option<f64> {
        self.index.get(s).map(|&i| self.values[i])
    }

    pub fn action(&self, s: &State) -> Option<ActionId> {
        self.index.get(s).and_then(|&i| self.policy[i])
    }

    pub fn q_values(&self, s: &State) -> &[(ActionId, f64)] {
        self.index.get(s).map_or(&[], |&i| &self.q[i])
    }
}

type Model = Vec<Vec<(ActionId, Vec<(usize, f64)>)>>;

fn build(p: &Problem, states: &[State], index: &FxHashMap<State, usize>) -> Model {
    states
        .iter()
        .map(|s| {
            if p.is_goal(s) {
                return Vec::new();
            }
            p.applicable(s)
                .into_iter()
                .map(|a| {
                    let dist = p
                        .successor_distribution(s, a)
                        .into_iter()
                        .filter(|(_, pr)| *pr > 0.0)
                        .map(|(t, pr)| (index[&t], pr))
                        .collect();
                    (a, dist)
                })
                .collect()
        })
        .collect()
}

fn backup(row: &[(ActionId, Vec<(usize, f64)>)], v: &[f64]) -> Vec<(ActionId, f64)> {
    row.iter()
        .map(|(a, dist)| (*a, dist.iter().map(|&(j, pr)| pr * v[j]).sum()))
        .collect()
}

/// First action with the maximal value.
fn greedy(q: &[(ActionId, f64)]) -> Option<(ActionId, f64)> {
    q.iter().copied().fold(None, |best, (a, x)| match best {
        Some((_, b)) if b >= x => best,
        _ => Some((a, x)),
    })
}

pub fn value_iteration(p: &Problem, criterion: Criterion, cfg: &LampConfig) -> Result<ValueTable, OracleError> {
    let states = reachable_states(p)?;
    let index: FxHashMap<State, usize> = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let model = build(p, &states, &index);
    let n = states.len();
    let goal: Vec<bool> = states.iter().map(|s| p.is_goal(s)).collect();
    let (values, residual) = match criterion {
        Criterion::MaxGoalProb => {
            let mut v: Vec<f64> = goal.iter().map(|&g| if g { 1.0 } else { 0.0 }).collect();
            let mut residual = f64::INFINITY;
            for _ in 0..MAX_SWEEPS {
                residual = 0.0;
                for i in 0..n {
                    if goal[i] || model[i].is_empty() {
                        continue;
                    }
                    let x = greedy(&backup(&model[i], &v)).map_or(0.0, |(_, x)| x);
                    residual = f64::max(residual, (x - v[i]).abs());
                    v[i] = x;
                }
                if residual < RESIDUAL {
                    break;
                }
            }
            (v, residual)
        }
        Criterion::ExpectedGubs => {
            let h = cfg.budget;
            let terminal = |c: u32, i: usize| gubs_utility(c, goal[i], cfg);
            let mut v: Vec<f64> = (0..n).map(|i| terminal(h, i)).collect();
            for c in (0..h).rev() {
                v = (0..n)
                    .map(|i| {
                        if goal[i] || model[i].is_empty() {
                            terminal(c, i)
                        } else {
                            greedy(&backup(&model[i], &v)).expect("non-empty").1
                        }
                    })
                    .collect();
            }
            (v, 0.0)
        }
    };
    // Action values at the fixpoint. For the utility criterion these are
    // one step from the start, so the next layer is recomputed.
    let next: Vec<f64> = match criterion {
        Criterion::MaxGoalProb => values.clone(),
        Criterion::ExpectedGubs => layer_after_first(p, &states, &model, cfg),
    };
    let q: Vec<Vec<(ActionId, f64)>> = model.iter().map(|row| backup(row, &next)).collect();
    let policy = q.iter().map(|row| greedy(row).map(|(a, _)| a)).collect();
    Ok(ValueTable { criterion, states, values, policy, q, residual, index })
}

/// Utility values after one action has been spent.
fn layer_after_first(p: &Problem, states: &[State], model: &Model, cfg: &LampConfig) -> Vec<f64> {
    let n = states.len();
    let goal: Vec<bool> = states.iter().map(|s| p.is_goal(s)).collect();
    let terminal = |c: u32, i: usize| gubs_utility(c, goal[i], cfg);
    let mut v: Vec<f64> = (0..n).map(|i| terminal(cfg.budget, i)).collect();
    for c in (1..cfg.budget).rev() {
        v = (0..n)
            .map(|i| {
                if goal[i] || model[i].is_empty() {
                    terminal(c, i)
                } else {
                    greedy(&backup(&model[i], &v)).expect("non-empty").1
                }
            })
            .collect();
    }
    v
}
