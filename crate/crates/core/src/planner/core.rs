//! Rollouts and the execution loop.

use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::tables::{argmax_random, ucb_update, Arms, QTables};
use super::{ConfigError, ExecutionOutcome, ExecutionStatus, LampConfig};
use crate::landmarks::{LandmarkGraph, LandmarkId, LandmarkSet};
use crate::model::{ActionId, History, Problem, State};

/// Costs and achievement flags backed up by a rollout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RolloutResult {
    pub lambda_phi: u32,
    pub beta_phi: bool,
    pub lambda_g: u32,
    pub beta_g: bool,
}

impl RolloutResult {
    const DONE: RolloutResult = RolloutResult { lambda_phi: 0, beta_phi: true, lambda_g: 0, beta_g: true };

    fn fail(d: u32) -> Self {
        RolloutResult { lambda_phi: d, beta_phi: false, lambda_g: d, beta_g: false }
    }
}

/// Decision nodes visited, accumulated over all rollouts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RolloutStats {
    pub rollouts: u64,
    pub action_nodes: u64,
    pub landmark_nodes: u64,
}

type Scores = SmallVec<[f64; 16]>;

/// Blended greedy choice `argmax α Q_φ + (1 - α) Q_g` over `actions`.
/// Missing table entries read as zero. `None` when `actions` is empty.
pub fn select_action<R: Rng + ?Sized>(
    tables: &QTables,
    s: &State,
    phi: LandmarkId,
    actions: &[ActionId],
    alpha: f64,
    rng: &mut R,
) -> Option<ActionId> {
    let goal = tables.goal.get(s);
    let lm = tables.landmark.get(&(phi, s.clone()));
    let read = |arms: Option<&Arms<ActionId>>, a: ActionId| {
        arms.and_then(|x| x.position(&a).map(|i| x.q[i])).unwrap_or(0.0)
    };
    let scores: Scores = actions
        .iter()
        .map(|&a| alpha * read(lm, a) + (1.0 - alpha) * read(goal, a))
        .collect();
    argmax_random(&scores, rng).map(|i| actions[i])
}

/// Planner state for one problem: the learned tables plus caches of
/// pruned applicable actions and landmark leaves.
pub struct LampCore<'a> {
    pub problem: &'a Problem,
    pub graph: &'a LandmarkGraph,
    pub cfg: LampConfig,
    pub tables: QTables,
    pub stats: RolloutStats,
    actions: FxHashMap<State, Rc<[ActionId]>>,
    leaves: FxHashMap<LandmarkSet, Rc<[LandmarkId]>>,
}

impl<'a> LampCore<'a> {
    pub fn new(problem: &'a Problem, graph: &'a LandmarkGraph, cfg: LampConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        Ok(LampCore {
            problem,
            graph,
            cfg,
            tables: QTables::default(),
            stats: RolloutStats::default(),
            actions: FxHashMap::default(),
            leaves: FxHashMap::default(),
        })
    }

    /// Applicable actions of `s` after duplicate-distribution pruning.
    pub fn applicable(&mut self, s: &State) -> Rc<[ActionId]> {
        if let Some(a) = self.actions.get(s) {
            return a.clone();
        }
        let a: Rc<[ActionId]> = Rc::from(self.problem.pruned_applicable(s));
        self.actions.insert(s.clone(), a.clone());
        a
    }

    pub fn leaves(&mut self, remaining: &LandmarkSet) -> Rc<[LandmarkId]> {
        if let Some(l) = self.leaves.get(remaining) {
            return l.clone();
        }
        let l: Rc<[LandmarkId]> = Rc::from(self.graph.leaves(remaining));
        self.leaves.insert(remaining.clone(), l.clone());
        l
    }

    pub fn rollout<R: Rng + ?Sized>(
        &mut self,
        s: &State,
        phi: Option<LandmarkId>,
        remaining: &LandmarkSet,
        d: u32,
        c: u32,
        rng: &mut R,
    ) -> RolloutResult {
        if remaining.is_empty() || self.problem.is_goal(s) {
            return RolloutResult::DONE;
        }
        let achieved = phi.is_none_or(|l| self.graph.condition(l).is_satisfied(s));
        if achieved {
            let rest = match phi {
                Some(l) => remaining.without(l),
                None => remaining.clone(),
            };
            if rest.is_empty() {
                return RolloutResult::DONE;
            }
            self.stats.landmark_nodes += 1;
            let cands = self.leaves(&rest);
            let expl = self.cfg.exploration_c;
            let arms = self.tables.selection.entry(rest.clone()).or_insert_with(|| Arms::new(cands.clone()));
            let scores: Scores = (0..cands.len()).map(|i| arms.ucb(i, expl)).collect();
            let idx = argmax_random(&scores, rng).expect("a non-empty DAG has leaves");
            let r = self.rollout(s, Some(cands[idx]), &rest, d, c, rng);
            let arms = self.tables.selection.get_mut(&rest).expect("inserted above");
            ucb_update(arms, idx, r.lambda_g + c, r.beta_g, &self.cfg);
            return RolloutResult { lambda_phi: 0, beta_phi: true, lambda_g: r.lambda_g, beta_g: r.beta_g };
        }
        let phi = phi.expect("checked above");
        if d == 0 {
            return RolloutResult::fail(d);
        }
        let acts = self.applicable(s);
        if acts.is_empty() {
            return RolloutResult::fail(d);
        }
        self.stats.action_nodes += 1;
        let idx = {
            let (alpha, expl) = (self.cfg.alpha, self.cfg.exploration_c);
            let goal = self.tables.goal.get(s);
            let lm = if alpha > 0.0 { self.tables.landmark.get(&(phi, s.clone())) } else { None };
            let ucb = |arms: Option<&Arms<ActionId>>, i: usize| arms.map_or(f64::INFINITY, |a| a.ucb(i, expl));
            // Zero-weight terms are skipped so that 0 * inf never occurs.
            let scores: Scores = (0..acts.len())
                .map(|i| {
                    let mut v = 0.0;
                    if alpha > 0.0 {
                        v += alpha * ucb(lm, i);
                    }
                    if alpha < 1.0 {
                        v += (1.0 - alpha) * ucb(goal, i);
                    }
                    v
                })
                .collect();
            argmax_random(&scores, rng).expect("non-empty")
        };
        let next = self.problem.simulate(s, acts[idx], rng).expect("pruned actions are applicable");
        let r = self.rollout(&next, Some(phi), remaining, d - 1, c + 1, rng);
        let (lambda_phi, lambda_g) = (r.lambda_phi + 1, r.lambda_g + 1);
        let cfg = &self.cfg;
        let lm = self.tables.landmark.entry((phi, s.clone())).or_insert_with(|| Arms::new(acts.clone()));
        ucb_update(lm, idx, lambda_phi + c, r.beta_phi, cfg);
        let goal = self.tables.goal.entry(s.clone()).or_insert_with(|| Arms::new(acts.clone()));
        ucb_update(goal, idx, lambda_g + c, r.beta_g, cfg);
        RolloutResult { lambda_phi, beta_phi: r.beta_phi, lambda_g, beta_g: r.beta_g }
    }

    /// The rollout batch run before every execution decision.
    pub fn run_rollouts<R: Rng + ?Sized>(
        &mut self,
        s: &State,
        phi: Option<LandmarkId>,
        remaining: &LandmarkSet,
        cost: u32,
        rng: &mut R,
    ) {
        for _ in 0..self.cfg.n_rollouts {
            self.stats.rollouts += 1;
            self.rollout(s, phi, remaining, self.cfg.depth, cost, rng);
        }
    }

    /// `argmax Q_LM(remaining, ·)` over the leaves of `remaining`.
    pub fn best_landmark<R: Rng + ?Sized>(&mut self, remaining: &LandmarkSet, rng: &mut R) -> Option<LandmarkId> {
        let cands = self.leaves(remaining);
        let arms = self.tables.selection.get(remaining);
        let scores: Scores = cands
            .iter()
            .map(|l| arms.and_then(|a| a.position(l).map(|i| a.q[i])).unwrap_or(0.0))
            .collect();
        argmax_random(&scores, rng).map(|i| cands[i])
    }

    /// Greedy blended action for `s` under landmark `phi`.
    pub fn best_action<R: Rng + ?Sized>(&mut self, s: &State, phi: LandmarkId, rng: &mut R) -> Option<ActionId> {
        let acts = self.applicable(s);
        select_action(&self.tables, s, phi, &acts, self.cfg.alpha, rng)
    }

    /// The execution loop, starting from the initial state.
    pub fn execute<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ExecutionOutcome {
        let p = self.problem;
        let mut history = History::new(p.init.clone());
        let mut remaining = self.graph.all();
        let mut phi: Option<LandmarkId> = None;
        let mut cost = 0u32;
        while !remaining.is_empty() && !p.is_goal(history.last()) && cost < self.cfg.budget {
            let s = history.last().clone();
            self.run_rollouts(&s, phi, &remaining, cost, rng);
            if phi.is_none_or(|l| self.graph.condition(l).is_satisfied(&s)) {
                if let Some(l) = phi {
                    remaining.remove(l);
                }
                phi = self.best_landmark(&remaining, rng);
            } else {
                let Some(a) = self.best_action(&s, phi.expect("set"), rng) else {
                    return ExecutionOutcome { status: ExecutionStatus::DeadEnd, history, cost };
                };
                let next = p.simulate(&s, a, rng).expect("pruned actions are applicable");
                history.push(a, next);
            }
            cost += 1;
        }
        let status = if p.is_goal(history.last()) {
            ExecutionStatus::Success
        } else {
            ExecutionStatus::BudgetExhausted
        };
        ExecutionOutcome { status, history, cost }
    }
}

/// Runs the planner once with `cfg.seed`.
pub fn lamp(p: &Problem, lg: &LandmarkGraph, cfg: &LampConfig) -> Result<ExecutionOutcome, ConfigError> {
    let mut core = LampCore::new(p, lg, cfg.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(core.execute(&mut rng))
}
