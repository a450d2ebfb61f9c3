//! RHW-style landmark extraction by backchaining over restricted RPGs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::rpg::{build_rpg, build_rpg_excluding, RelaxedPlanningGraph};
use super::{LandmarkGraph, LandmarkId, Ordering, OrderingKind};
use crate::determinize::{DetAction, DetProblem};
use crate::model::{Condition, FactId};

/// Largest disjunctive landmark considered.
pub const MAX_DISJUNCTION_SIZE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandmarkError {
    #[error("goal is not reachable from the initial state even under delete relaxation")]
    UnreachableGoal,
}

struct Extractor<'a, 'p> {
    dp: &'a DetProblem<'p>,
    conds: Vec<Condition>,
    index: FxHashMap<Condition, usize>,
    // (from, to) -> kind; slot `goal` stands for the goal node.
    edges: BTreeMap<(usize, usize), OrderingKind>,
    // Insertion rank per edge, for deterministic cycle breaking.
    rank: FxHashMap<(usize, usize), usize>,
    restricted: FxHashMap<usize, RelaxedPlanningGraph>,
}

fn adds_any(a: &DetAction, facts: &[FactId]) -> bool {
    a.add.iter().any(|f| facts.binary_search(f).is_ok())
}

fn predicate<'p>(dp: &DetProblem<'p>, f: FactId) -> &'p str {
    dp.source.facts[f.index()].predicate()
}

impl<'a, 'p> Extractor<'a, 'p> {
    fn intern(&mut self, c: Condition) -> (usize, bool) {
        if let Some(&i) = self.index.get(&c) {
            return (i, false);
        }
        let i = self.conds.len();
        self.index.insert(c.clone(), i);
        self.conds.push(c);
        (i, true)
    }

    fn add_edge(&mut self, from: usize, to: usize, kind: OrderingKind) {
        if from == to {
            return;
        }
        let next = self.rank.len();
        self.rank.entry((from, to)).or_insert(next);
        let e = self.edges.entry((from, to)).or_insert(kind);
        if kind.strength() > e.strength() {
            *e = kind;
        }
    }

    fn restricted_rpg(&mut self, i: usize) -> &RelaxedPlanningGraph {
        if !self.restricted.contains_key(&i) {
            let facts = self.conds[i].facts().to_vec();
            let rpg = build_rpg_excluding(self.dp, self.dp.init(), |a| adds_any(a, &facts));
            self.restricted.insert(i, rpg);
        }
        &self.restricted[&i]
    }

    /// Derives fact and disjunctive landmarks that must hold right before
    /// landmark `i` first becomes true. Returns the newly found ones.
    fn backchain(&mut self, i: usize) -> Vec<usize> {
        let dp = self.dp;
        let target = self.conds[i].clone();
        let facts = target.facts().to_vec();
        let rpg = self.restricted_rpg(i).clone();
        let first: Vec<&DetAction> = dp
            .actions
            .iter()
            .filter(|a| adds_any(a, &facts) && a.precondition.iter().all(|&f| rpg.is_reachable(f)))
            .collect();
        if first.is_empty() {
            return Vec::new();
        }
        let init = dp.init();
        let mut shared: BTreeSet<FactId> = first[0].precondition.iter().copied().collect();
        for a in &first[1..] {
            shared.retain(|f| a.precondition.contains(f));
        }
        // Necessary orderings need the fact before every achiever, not only
        // the first ones; only meaningful for single-fact targets.
        let all_adders: Vec<&DetAction> = dp.actions.iter().filter(|a| adds_any(a, &facts)).collect();
        let mut found = Vec::new();
        for &f in &shared {
            if init.contains(f) {
                continue;
            }
            let kind = if facts.len() == 1 && !target.is_disjunctive() && all_adders.iter().all(|a| a.precondition.contains(&f)) {
                OrderingKind::Necessary
            } else {
                OrderingKind::GreedyNecessary
            };
            let (j, new) = self.intern(Condition::fact(f));
            self.add_edge(j, i, kind);
            if new {
                found.push(j);
            }
        }
        // Same-predicate disjunctions covering every first achiever.
        let mut by_pred: BTreeMap<&str, Vec<BTreeSet<FactId>>> = BTreeMap::new();
        for (k, a) in first.iter().enumerate() {
            for &f in &a.precondition {
                if shared.contains(&f) {
                    continue;
                }
                let sets = by_pred.entry(predicate(dp, f)).or_insert_with(|| vec![BTreeSet::new(); first.len()]);
                sets[k].insert(f);
            }
        }
        for sets in by_pred.values() {
            if sets.iter().any(BTreeSet::is_empty) {
                continue;
            }
            let union: BTreeSet<FactId> = sets.iter().flatten().copied().collect();
            if union.len() < 2 || union.len() > MAX_DISJUNCTION_SIZE {
                continue;
            }
            if union.iter().any(|&f| init.contains(f) || self.index.contains_key(&Condition::fact(f))) {
                continue;
            }
            let c = Condition::disjunction(union).expect("non-empty");
            let (j, new) = self.intern(c);
            self.add_edge(j, i, OrderingKind::GreedyNecessary);
            if new {
                found.push(j);
            }
        }
        found
    }
}

fn find_cycle(n: usize, edges: &BTreeMap<(usize, usize), OrderingKind>) -> Option<Vec<(usize, usize)>> {
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges.keys() {
        succ[a].push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut color = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (u, ref mut k)) = stack.last_mut() {
            if *k < succ[u].len() {
                let v = succ[u][*k];
                *k += 1;
                match color[v] {
                    0 => {
                        color[v] = 1;
                        parent[v] = u;
                        stack.push((v, 0));
                    }
                    1 => {
                        let mut cycle = vec![(u, v)];
                        let mut w = u;
                        while w != v {
                            cycle.push((parent[w], w));
                            w = parent[w];
                        }
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Extracts landmarks and orderings from the determinized problem.
///
/// Landmarks true in the initial state are pruned; the goal node is
/// appended last and ordered after everything.
pub fn extract_landmarks(dp: &DetProblem<'_>) -> Result<LandmarkGraph, LandmarkError> {
    let goal = dp.goal().clone();
    let init = dp.init();
    if goal.is_satisfied(init) {
        return Ok(LandmarkGraph::new(Vec::new(), Vec::new(), goal));
    }
    let full = build_rpg(dp, init);
    if !full.is_condition_reachable(&goal) {
        return Err(LandmarkError::UnreachableGoal);
    }
    let mut ex = Extractor {
        dp,
        conds: Vec::new(),
        index: FxHashMap::default(),
        edges: BTreeMap::new(),
        rank: FxHashMap::default(),
        restricted: FxHashMap::default(),
    };
    let mut queue = VecDeque::new();
    // Slot 0 is the goal node. A single-fact goal is its own landmark;
    // a conjunctive goal contributes each fact.
    ex.intern(goal.clone());
    if goal.facts().len() == 1 {
        queue.push_back(0);
    } else {
        for &f in goal.facts() {
            let (j, new) = ex.intern(Condition::fact(f));
            if new && !init.contains(f) {
                queue.push_back(j);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        for j in ex.backchain(i) {
            queue.push_back(j);
        }
    }

    // Keep: non-goal, not init-true, and disjunctions without a disjunct
    // that is a fact landmark in its own right.
    let n = ex.conds.len();
    let keep: Vec<bool> = (0..n)
        .map(|i| {
            let c = &ex.conds[i];
            i != 0
                && !c.is_satisfied(init)
                && !(c.is_disjunctive() && c.facts().iter().any(|&f| ex.index.contains_key(&Condition::fact(f))))
        })
        .collect();

    // Natural orderings from restricted reachability. Level dominance is
    // implied, but checked for clarity.
    let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    for &a in &kept {
        let a_facts = ex.conds[a].facts().to_vec();
        let rpg = ex.restricted_rpg(a).clone();
        for &b in &kept {
            if a == b || ex.edges.contains_key(&(a, b)) {
                continue;
            }
            let cb = ex.conds[b].clone();
            if rpg.is_condition_reachable(&cb) {
                continue;
            }
            let (la, lb) = (full.condition_level(&ex.conds[a]), full.condition_level(&cb));
            if !matches!((la, lb), (Some(x), Some(y)) if x < y) {
                continue;
            }
            let joint = dp.actions.iter().any(|d| adds_any(d, &a_facts) && adds_any(d, cb.facts()));
            if !joint {
                ex.add_edge(a, b, OrderingKind::Natural);
            }
        }
    }

    // Restrict edges to kept landmarks, then break cycles.
    let mut edges: BTreeMap<(usize, usize), OrderingKind> =
        ex.edges.iter().filter(|((a, b), _)| keep[*a] && keep[*b]).map(|(&k, &v)| (k, v)).collect();
    while let Some(cycle) = find_cycle(n, &edges) {
        let weakest = cycle
            .iter()
            .copied()
            .min_by_key(|e| (edges[e].strength(), std::cmp::Reverse(ex.rank[e])))
            .expect("cycle has edges");
        edges.remove(&weakest);
    }

    // Renumber in discovery order; goal node goes last.
    let mut new_id = vec![None; n];
    let mut conditions = Vec::new();
    for &i in &kept {
        new_id[i] = Some(LandmarkId(conditions.len() as u32));
        conditions.push(ex.conds[i].clone());
    }
    let orderings = edges
        .iter()
        .map(|(&(a, b), &kind)| Ordering { from: new_id[a].unwrap(), to: new_id[b].unwrap(), kind })
        .collect();
    Ok(LandmarkGraph::new(conditions, orderings, goal))
}
