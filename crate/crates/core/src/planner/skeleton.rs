//! The landmark-guided planning skeleton with pluggable selection.

use std::cell::RefCell;
use std::rc::Rc;

use rand::{Rng, RngCore};

use super::core::LampCore;
use super::{ExecutionOutcome, ExecutionStatus};
use crate::landmarks::{LandmarkGraph, LandmarkId, LandmarkSet};
use crate::model::{ActionId, History, Problem, State};

/// Picks the next landmark once the current one (`previous`, already
/// removed from `remaining`) has been achieved.
pub trait LandmarkSelector {
    fn select(
        &mut self,
        s: &State,
        previous: Option<LandmarkId>,
        remaining: &LandmarkSet,
        cost: u32,
        rng: &mut dyn RngCore,
    ) -> Option<LandmarkId>;
}

/// Picks an action towards landmark `phi`; `None` signals a dead end.
pub trait ActionSelector {
    fn select(
        &mut self,
        s: &State,
        phi: LandmarkId,
        remaining: &LandmarkSet,
        cost: u32,
        rng: &mut dyn RngCore,
    ) -> Option<ActionId>;
}

/// Runs the skeleton loop: pursue the current landmark until it holds,
/// then ask for the next one, until the goal holds or `budget` loop
/// iterations have been spent.
pub fn landmark_plan(
    p: &Problem,
    lg: &LandmarkGraph,
    budget: u32,
    landmarks: &mut dyn LandmarkSelector,
    actions: &mut dyn ActionSelector,
    rng: &mut dyn RngCore,
) -> ExecutionOutcome {
    let mut history = History::new(p.init.clone());
    let mut remaining = lg.all();
    let mut phi: Option<LandmarkId> = None;
    let mut cost = 0u32;
    while !remaining.is_empty() && !p.is_goal(history.last()) && cost < budget {
        let s = history.last().clone();
        if phi.is_none_or(|l| lg.condition(l).is_satisfied(&s)) {
            if let Some(l) = phi {
                remaining.remove(l);
            }
            phi = landmarks.select(&s, phi, &remaining, cost, rng);
        } else {
            let Some(a) = actions.select(&s, phi.expect("set"), &remaining, cost, rng) else {
                return ExecutionOutcome { status: ExecutionStatus::DeadEnd, history, cost };
            };
            let next = p.simulate(&s, a, rng).expect("selected actions are applicable");
            history.push(a, next);
        }
        cost += 1;
    }
    let status = if p.is_goal(history.last()) { ExecutionStatus::Success } else { ExecutionStatus::BudgetExhausted };
    ExecutionOutcome { status, history, cost }
}

/// Landmark selection backed by a shared [`LampCore`]: a rollout batch,
/// then the greedy choice on the selection table.
pub struct LampLandmarkSelector<'a> {
    pub core: Rc<RefCell<LampCore<'a>>>,
}

impl LandmarkSelector for LampLandmarkSelector<'_> {
    fn select(
        &mut self,
        s: &State,
        previous: Option<LandmarkId>,
        remaining: &LandmarkSet,
        cost: u32,
        rng: &mut dyn RngCore,
    ) -> Option<LandmarkId> {
        let mut core = self.core.borrow_mut();
        let mut before = remaining.clone();
        if let Some(l) = previous {
            before.insert(l);
        }
        core.run_rollouts(s, previous, &before, cost, rng);
        core.best_landmark(remaining, rng)
    }
}

/// Action selection backed by a shared [`LampCore`].
pub struct LampActionSelector<'a> {
    pub core: Rc<RefCell<LampCore<'a>>>,
}

impl ActionSelector for LampActionSelector<'_> {
    fn select(
        &mut self,
        s: &State,
        phi: LandmarkId,
        remaining: &LandmarkSet,
        cost: u32,
        rng: &mut dyn RngCore,
    ) -> Option<ActionId> {
        let mut core = self.core.borrow_mut();
        core.run_rollouts(s, Some(phi), remaining, cost, rng);
        core.best_action(s, phi, rng)
    }
}

/// Uniform choice among the current leaves.
pub struct RandomLandmarkSelector<'a> {
    pub graph: &'a LandmarkGraph,
}

impl LandmarkSelector for RandomLandmarkSelector<'_> {
    fn select(
        &mut self,
        _s: &State,
        _previous: Option<LandmarkId>,
        remaining: &LandmarkSet,
        _cost: u32,
        rng: &mut dyn RngCore,
    ) -> Option<LandmarkId> {
        let leaves = self.graph.leaves(remaining);
        (!leaves.is_empty()).then(|| leaves[rng.random_range(0..leaves.len())])
    }
}

/// Uniform choice among the pruned applicable actions.
pub struct RandomActionSelector<'a> {
    pub problem: &'a Problem,
}

impl ActionSelector for RandomActionSelector<'_> {
    fn select(
        &mut self,
        s: &State,
        _phi: LandmarkId,
        _remaining: &LandmarkSet,
        _cost: u32,
        rng: &mut dyn RngCore,
    ) -> Option<ActionId> {
        let acts = self.problem.pruned_applicable(s);
        (!acts.is_empty()).then(|| acts[rng.random_range(0..acts.len())])
    }
}
