//! Delete-relaxed planning graphs.

use crate::determinize::{DetAction, DetActionId, DetProblem};
use crate::model::{Condition, ConditionKind, FactId, State};

/// First-appearance levels of facts and actions under delete relaxation,
/// starting from `init`. Actions rejected by `allowed` never fire.
///
/// Returns `(fact_level, action_level)`; `None` marks unreachable items.
pub fn relaxed_levels(
    n_facts: usize,
    init: impl IntoIterator<Item = FactId>,
    pre: &[&[FactId]],
    add: &[&[FactId]],
    allowed: impl Fn(usize) -> bool,
) -> (Vec<Option<u32>>, Vec<Option<u32>>) {
    let n_actions = pre.len();
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); n_facts];
    let mut missing: Vec<usize> = Vec::with_capacity(n_actions);
    for (a, facts) in pre.iter().enumerate() {
        let mut uniq = facts.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        for f in &uniq {
            users[f.index()].push(a);
        }
        missing.push(uniq.len());
    }
    let mut fact_level = vec![None; n_facts];
    let mut action_level = vec![None; n_actions];
    let mut frontier: Vec<FactId> = Vec::new();
    for f in init {
        if fact_level[f.index()].is_none() {
            fact_level[f.index()] = Some(0);
            frontier.push(f);
        }
    }
    let mut ready: Vec<usize> = (0..n_actions).filter(|&a| missing[a] == 0 && allowed(a)).collect();
    let mut level = 0u32;
    loop {
        for f in frontier.drain(..) {
            for &a in &users[f.index()] {
                missing[a] -= 1;
                if missing[a] == 0 && allowed(a) {
                    ready.push(a);
                }
            }
        }
        if ready.is_empty() {
            break;
        }
        for a in ready.drain(..) {
            action_level[a] = Some(level);
            for f in add[a] {
                if fact_level[f.index()].is_none() {
                    fact_level[f.index()] = Some(level + 1);
                    frontier.push(*f);
                }
            }
        }
        level += 1;
    }
    (fact_level, action_level)
}

#[derive(Debug, Clone)]
pub struct RelaxedPlanningGraph {
    pub fact_level: Vec<Option<u32>>,
    pub action_level: Vec<Option<u32>>,
    /// Per fact, the actions adding it at its first level.
    pub first_achievers: Vec<Vec<DetActionId>>,
}

impl RelaxedPlanningGraph {
    pub fn level(&self, f: FactId) -> Option<u32> {
        self.fact_level[f.index()]
    }

    pub fn is_reachable(&self, f: FactId) -> bool {
        self.fact_level[f.index()].is_some()
    }

    /// Level at which `c` first holds: the max over a conjunction, the min
    /// over a disjunction.
    pub fn condition_level(&self, c: &Condition) -> Option<u32> {
        let mut levels = c.facts().iter().map(|&f| self.level(f));
        match c.kind() {
            ConditionKind::Conjunction => levels.try_fold(0, |acc, l| l.map(|l| acc.max(l))),
            ConditionKind::Disjunction => levels.flatten().min(),
        }
    }

    pub fn is_condition_reachable(&self, c: &Condition) -> bool {
        self.condition_level(c).is_some()
    }
}

/// Builds the relaxed planning graph of `dp` from `s`, skipping actions
/// for which `excluded` holds.
pub fn build_rpg_excluding(
    dp: &DetProblem<'_>,
    s: &State,
    excluded: impl Fn(&DetAction) -> bool,
) -> RelaxedPlanningGraph {
    let pre: Vec<&[FactId]> = dp.actions.iter().map(|a| a.precondition.as_slice()).collect();
    let add: Vec<&[FactId]> = dp.actions.iter().map(|a| a.add.as_slice()).collect();
    let (fact_level, action_level) =
        relaxed_levels(dp.n_facts(), s.facts(), &pre, &add, |i| !excluded(&dp.actions[i]));
    let mut first_achievers = vec![Vec::new(); dp.n_facts()];
    for a in &dp.actions {
        let Some(la) = action_level[a.id.index()] else { continue };
        for f in &a.add {
            if fact_level[f.index()] == Some(la + 1) {
                first_achievers[f.index()].push(a.id);
            }
        }
    }
    RelaxedPlanningGraph { fact_level, action_level, first_achievers }
}

pub fn build_rpg(dp: &DetProblem<'_>, s: &State) -> RelaxedPlanningGraph {
    build_rpg_excluding(dp, s, |_| false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::determinize;
    use crate::model::{ActionId, Outcome, ProbAction, Problem};
    use crate::ppddl::generators::{triangle_nodes, triangle_roads, triangle_tireworld};
    use std::collections::VecDeque;

    fn chain() -> Problem {
        let step = |from: u32, to: u32| ProbAction {
            id: ActionId(0),
            name: format!("s{from}"),
            precondition: vec![FactId(from)],
            outcomes: vec![Outcome::new(1.0, vec![FactId(to)], vec![FactId(from)])],
        };
        Problem::new("chain", vec!["f0".into(), "f1".into(), "f2".into()], vec![step(0, 1), step(1, 2)], vec![FactId(0)], vec![FactId(2)])
            .unwrap()
    }

    #[test]
    fn chain_levels() {
        let p = chain();
        let dp = determinize(&p);
        let rpg = build_rpg(&dp, &p.init);
        assert_eq!(rpg.fact_level, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(rpg.action_level, vec![Some(0), Some(1)]);
        assert_eq!(rpg.first_achievers[2], vec![DetActionId(1)]);
    }

    #[test]
    fn goal_state_has_goal_at_level_zero() {
        let p = chain();
        let dp = determinize(&p);
        let s = p.state([FactId(2)]);
        let rpg = build_rpg(&dp, &s);
        assert_eq!(rpg.condition_level(&p.goal), Some(0));
        assert!(!rpg.is_reachable(FactId(0)));
    }

    #[test]
    fn triangle_goal_level_matches_road_bfs() {
        // Oracle: plain BFS over the road network (relaxation never loses
        // the intact tire, so only roads matter).
        let n = 2;
        let nodes = triangle_nodes(n).len();
        let roads = triangle_roads(n);
        let mut dist = vec![usize::MAX; nodes + 1];
        dist[1] = 0;
        let mut q = VecDeque::from([1usize]);
        while let Some(u) = q.pop_front() {
            for &(a, b) in &roads {
                if a == u && dist[b] == usize::MAX {
                    dist[b] = dist[u] + 1;
                    q.push_back(b);
                }
            }
        }
        let p = triangle_tireworld(n);
        let dp = determinize(&p);
        let rpg = build_rpg(&dp, &p.init);
        let goal = p.fact_id("car-at(n15)").unwrap();
        assert_eq!(rpg.level(goal), Some(dist[nodes] as u32));
        assert_eq!(dist[nodes], 4);
    }

    #[test]
    fn exclusion_cuts_reachability() {
        let p = chain();
        let dp = determinize(&p);
        let rpg = build_rpg_excluding(&dp, &p.init, |a| a.add.contains(&FactId(1)));
        assert!(!rpg.is_reachable(FactId(1)));
        assert!(!rpg.is_reachable(FactId(2)));
    }
}
