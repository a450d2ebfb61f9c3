//! Sequential landmark achievement with a classical sub-planner.

use std::collections::VecDeque;

use rand::RngCore;
use rustc_hash::FxHashMap;

use crate::determinize::determinize;
use crate::landmarks::build_rpg;
use crate::model::{ActionId, Condition, History, Problem, State};

/// A partial policy: the action to take in each covered state.
pub type Policy = FxHashMap<State, ActionId>;

pub trait SubPlanner {
    /// A policy driving `s` towards `target`, or `None` if the planner finds
    /// `target` unreachable. States satisfying `target` need no entry.
    fn plan(&mut self, p: &Problem, s: &State, target: &Condition) -> Option<Policy>;
}

/// Breadth-first search in the all-outcomes determinization. The policy
/// follows the shortest plan found; `expanded` counts popped nodes over
/// all calls, goal test included.
#[derive(Debug, Default, Clone)]
pub struct BfsPlanner {
    pub expanded: u64,
}

impl SubPlanner for BfsPlanner {
    fn plan(&mut self, p: &Problem, s: &State, target: &Condition) -> Option<Policy> {
        let dp = determinize(p);
        let mut parent: FxHashMap<State, Option<(State, ActionId)>> = FxHashMap::default();
        parent.insert(s.clone(), None);
        let mut queue = VecDeque::from([s.clone()]);
        while let Some(u) = queue.pop_front() {
            self.expanded += 1;
            if target.is_satisfied(&u) {
                let mut policy = Policy::default();
                let mut cur = u;
                while let Some(Some((prev, a))) = parent.get(&cur).cloned() {
                    policy.insert(prev.clone(), a);
                    cur = prev;
                }
                return Some(policy);
            }
            for d in dp.applicable(&u) {
                let v = d.apply(&u);
                if !parent.contains_key(&v) {
                    parent.insert(v.clone(), Some((u.clone(), d.origin.0)));
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequentialStatus {
    Success,
    /// No policy exists for landmark `index` from the state reached.
    UnreachableSubgoal { index: usize },
    /// Achieving landmark `index` led to a state where the goal is
    /// unreachable.
    Deadlock { index: usize },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialOutcome {
    pub status: SequentialStatus,
    pub history: History,
    /// Sub-planner calls, including replans after leaving a policy.
    pub plans: u32,
}

impl SequentialOutcome {
    pub fn final_state(&self) -> &State {
        self.history.last()
    }
}

/// Achieves `landmarks` in order, replanning whenever execution leaves the
/// current policy. `budget` bounds the number of executed actions. The last
/// landmark should be the goal.
pub fn sequential_plan(
    p: &Problem,
    landmarks: &[Condition],
    sub: &mut dyn SubPlanner,
    budget: u32,
    rng: &mut dyn RngCore,
) -> SequentialOutcome {
    let dp = determinize(p);
    let mut history = History::new(p.init.clone());
    let mut plans = 0;
    let done = |status, history, plans| SequentialOutcome { status, history, plans };
    for (i, target) in landmarks.iter().enumerate() {
        if i > 0 && !build_rpg(&dp, history.last()).is_condition_reachable(&p.goal) {
            return done(SequentialStatus::Deadlock { index: i - 1 }, history, plans);
        }
        while !target.is_satisfied(history.last()) {
            plans += 1;
            let Some(policy) = sub.plan(p, history.last(), target) else {
                return done(SequentialStatus::UnreachableSubgoal { index: i }, history, plans);
            };
            if !policy.contains_key(history.last()) {
                return done(SequentialStatus::UnreachableSubgoal { index: i }, history, plans);
            }
            while !target.is_satisfied(history.last()) {
                let Some(&a) = policy.get(history.last()) else { break };
                if history.actions.len() as u32 >= budget {
                    return done(SequentialStatus::BudgetExhausted, history, plans);
                }
                let next = p.simulate(history.last(), a, rng).expect("policy actions are applicable");
                history.push(a, next);
            }
        }
    }
    let status = if p.is_goal(history.last()) {
        SequentialStatus::Success
    } else {
        SequentialStatus::UnreachableSubgoal { index: landmarks.len() }
    };
    done(status, history, plans)
}
