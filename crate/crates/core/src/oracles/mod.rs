//! Brute-force references for tests: history enumeration, landmark and
//! ordering validation, value iteration, an independent UCT, a BFS meter
//! and a golden-value store.

mod golden;
mod uct;
mod value;

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::landmarks::{LandmarkGraph, OrderingKind};
use crate::model::{apply_outcome, ActionId, Condition, History, Problem, State};

pub use golden::{check_or_record, check_or_record_f64, GoldenError};
pub use uct::plain_uct;
pub use value::{value_iteration, Criterion, ValueTable};

pub const MAX_HISTORIES: usize = 1_000_000;
pub const MAX_STATES: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration exceeded {0} nodes")]
    HistoryBudget(usize),
    #[error("reachable state space exceeds {0} states")]
    StateBudget(usize),
}

/// Distinct successors of `s` over every outcome of every applicable
/// action, in action then outcome order, each with the first action
/// producing it. Self-loops are dropped.
fn successors(p: &Problem, s: &State) -> Vec<(ActionId, State)> {
    let mut out: Vec<(ActionId, State)> = Vec::new();
    for a in p.applicable(s) {
        for o in p.action(a).outcomes.iter().filter(|o| o.probability > 0.0) {
            let t = apply_outcome(s, o);
            if t != *s && !out.iter().any(|(_, u)| *u == t) {
                out.push((a, t));
            }
        }
    }
    out
}

/// Every history of at most `depth_bound` transitions that ends in its
/// first goal state. Transitions range over every outcome with positive probability,
/// so each history is generated with positive probability by some policy.
pub fn enumerate_goal_histories(p: &Problem, depth_bound: usize) -> Result<Vec<History>, OracleError> {
    let mut out = Vec::new();
    let mut nodes = 0usize;
    let mut cache: FxHashMap<State, Vec<(ActionId, State)>> = FxHashMap::default();
    let mut h = History::new(p.init.clone());
    dfs(p, depth_bound, &mut h, &mut out, &mut nodes, &mut cache)?;
    Ok(out)
}

fn dfs(
    p: &Problem,
    bound: usize,
    h: &mut History,
    out: &mut Vec<History>,
    nodes: &mut usize,
    cache: &mut FxHashMap<State, Vec<(ActionId, State)>>,
) -> Result<(), OracleError> {
    *nodes += 1;
    if *nodes > MAX_HISTORIES {
        return Err(OracleError::HistoryBudget(MAX_HISTORIES));
    }
    let s = h.last().clone();
    if p.is_goal(&s) {
        out.push(h.clone());
        return Ok(());
    }
    if h.actions.len() == bound {
        return Ok(());
    }
    let succ = cache.entry(s.clone()).or_insert_with(|| successors(p, &s)).clone();
    for (a, t) in succ {
        h.push(a, t);
        let r = dfs(p, bound, h, out, nodes, cache);
        h.states.pop();
        h.actions.pop();
        r?;
    }
    Ok(())
}

fn first_index(h: &History, c: &Condition) -> Option<usize> {
    h.states.iter().position(|s| c.is_satisfied(s))
}

/// Whether `c` holds at some point of every history.
pub fn validate_landmark(histories: &[History], c: &Condition) -> bool {
    histories.iter().all(|h| first_index(h, c).is_some())
}

/// Checks an ordering `a ≺ b` on every history in which `b` becomes true
/// after the initial state.
///
/// * natural: `a` holds at some point before `b` first holds;
/// * greedy-necessary: `a` holds immediately before `b` first holds;
/// * necessary: `a` holds immediately before every step that makes `b` true.
pub fn validate_ordering(histories: &[History], a: &Condition, b: &Condition, kind: OrderingKind) -> bool {
    histories.iter().all(|h| {
        let Some(i) = first_index(h, b) else { return true };
        if i == 0 {
            return true;
        }
        match kind {
            OrderingKind::Natural => h.states[..i].iter().any(|s| a.is_satisfied(s)),
            OrderingKind::GreedyNecessary => a.is_satisfied(&h.states[i - 1]),
            OrderingKind::Necessary => (1..h.states.len())
                .filter(|&j| b.is_satisfied(&h.states[j]) && !b.is_satisfied(&h.states[j - 1]))
                .all(|j| a.is_satisfied(&h.states[j - 1])),
        }
    })
}

/// Ids of landmarks and ordering indices of `lg` that fail validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphReport {
    pub landmarks_checked: usize,
    pub orderings_checked: usize,
    pub bad_landmarks: Vec<u32>,
    pub bad_orderings: Vec<usize>,
}

impl GraphReport {
    pub fn is_sound(&self) -> bool {
        self.bad_landmarks.is_empty() && self.bad_orderings.is_empty()
    }
}

pub fn validate_graph(lg: &LandmarkGraph, histories: &[History]) -> GraphReport {
    let mut r = GraphReport::default();
    for l in lg.landmarks() {
        r.landmarks_checked += 1;
        if !validate_landmark(histories, &l.condition) {
            r.bad_landmarks.push(l.id.0);
        }
    }
    for (i, o) in lg.orderings().iter().enumerate() {
        r.orderings_checked += 1;
        if !validate_ordering(histories, lg.condition(o.from), lg.condition(o.to), o.kind) {
            r.bad_orderings.push(i);
        }
    }
    r
}

/// Breadth-first search over all outcomes from `s` to a state satisfying
/// `target`. Returns the plan length if found and the number of states
/// popped, goal test included.
pub fn bfs_expansions(p: &Problem, s: &State, target: &Condition) -> (Option<usize>, u64) {
    let mut depth: FxHashMap<State, usize> = FxHashMap::default();
    depth.insert(s.clone(), 0);
    let mut queue = VecDeque::from([s.clone()]);
    let mut popped = 0u64;
    while let Some(u) = queue.pop_front() {
        popped += 1;
        let du = depth[&u];
        if target.is_satisfied(&u) {
            return (Some(du), popped);
        }
        for a in p.applicable(&u) {
            for o in &p.action(a).outcomes {
                let v = apply_outcome(&u, o);
                if !depth.contains_key(&v) {
                    depth.insert(v.clone(), du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    (None, popped)
}

/// The states reachable from the initial state, in BFS order.
pub fn reachable_states(p: &Problem) -> Result<Vec<State>, OracleError> {
    let mut seen: FxHashSet<State> = FxHashSet::default();
    let mut order = vec![p.init.clone()];
    seen.insert(p.init.clone());
    let mut i = 0;
    while i < order.len() {
        let s = order[i].clone();
        i += 1;
        if p.is_goal(&s) {
            continue;
        }
        for a in p.applicable(&s) {
            for o in &p.action(a).outcomes {
                if o.probability <= 0.0 {
                    continue;
                }
                let t = apply_outcome(&s, o);
                if seen.insert(t.clone()) {
                    if order.len() >= MAX_STATES {
                        return Err(OracleError::StateBudget(MAX_STATES));
                    }
                    order.push(t);
                }
            }
        }
    }
    Ok(order)
}
