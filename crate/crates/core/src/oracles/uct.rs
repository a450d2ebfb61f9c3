//! A standalone single-table UCT written without the planner's tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::model::{ActionId, History, Problem, State};
use crate::planner::{ConfigError, ExecutionOutcome, ExecutionStatus, LampConfig};

struct Node {
    actions: Vec<ActionId>,
    visits: u64,
    value: Vec<f64>,
    tries: Vec<u64>,
}

struct Uct<'a> {
    p: &'a Problem,
    cfg: &'a LampConfig,
    tree: FxHashMap<State, Node>,
}

fn pick<R: Rng + ?Sized>(scores: &[f64], rng: &mut R) -> Option<usize> {
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == top).collect();
    match best.len() {
        0 => None,
        1 => Some(best[0]),
        k => Some(best[rng.random_range(0..k)]),
    }
}

impl Uct<'_> {
    fn utility(&self, cost: u32, goal: bool) -> f64 {
        (-(cost as f64) / self.cfg.utility_decay).exp() + if goal { self.cfg.k_g } else { 0.0 }
    }

    /// Returns the rollout's cost from `s` and whether it reached the goal.
    fn simulate<R: Rng + ?Sized>(&mut self, s: &State, d: u32, c: u32, rng: &mut R) -> (u32, bool) {
        if self.p.is_goal(s) {
            return (0, true);
        }
        if d == 0 {
            return (0, false);
        }
        let p = self.p;
        let node = self.tree.entry(s.clone()).or_insert_with(|| {
            let actions = p.pruned_applicable(s);
            let k = actions.len();
            Node { actions, visits: 0, value: vec![0.0; k], tries: vec![0; k] }
        });
        if node.actions.is_empty() {
            return (d, false);
        }
        let cexp = self.cfg.exploration_c;
        // Nodes are created lazily here, so an unvisited node has all arms
        // at +inf just like a missing table entry.
        let scores: Vec<f64> = (0..node.actions.len())
            .map(|i| {
                if node.tries[i] == 0 {
                    f64::INFINITY
                } else if cexp == 0.0 {
                    node.value[i]
                } else {
                    node.value[i] + cexp * ((node.visits as f64).ln() / node.tries[i] as f64).sqrt()
                }
            })
            .collect();
        let i = pick(&scores, rng).expect("non-empty");
        let a = node.actions[i];
        let next = p.simulate(s, a, rng).expect("applicable");
        let (sub, goal) = self.simulate(&next, d - 1, c + 1, rng);
        let lambda = sub + 1;
        let x = self.utility(lambda + c, goal);
        let node = self.tree.get_mut(s).expect("created above");
        node.value[i] += (x - node.value[i]) / (1.0 + node.tries[i] as f64);
        node.visits += 1;
        node.tries[i] += 1;
        (lambda, goal)
    }

    fn greedy<R: Rng + ?Sized>(&mut self, s: &State, rng: &mut R) -> Option<ActionId> {
        let actions = self.p.pruned_applicable(s);
        let node = self.tree.get(s);
        let scores: Vec<f64> = actions
            .iter()
            .map(|a| {
                node.and_then(|n| n.actions.iter().position(|b| b == a).map(|i| n.value[i]))
                    .unwrap_or(0.0)
            })
            .collect();
        pick(&scores, rng).map(|i| actions[i])
    }
}

/// Plain UCT on the goal only. Like the planner with a goal-only landmark
/// graph, the first loop iteration runs a rollout batch and spends one unit
/// of the budget without acting.
pub fn plain_uct(p: &Problem, cfg: &LampConfig) -> Result<ExecutionOutcome, ConfigError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut uct = Uct { p, cfg, tree: FxHashMap::default() };
    let mut history = History::new(p.init.clone());
    let mut cost = 0u32;
    let mut started = false;
    while !p.is_goal(history.last()) && cost < cfg.budget {
        let s = history.last().clone();
        for _ in 0..cfg.n_rollouts {
            uct.simulate(&s, cfg.depth, cost, &mut rng);
        }
        if started {
            let Some(a) = uct.greedy(&s, &mut rng) else {
                return Ok(ExecutionOutcome { status: ExecutionStatus::DeadEnd, history, cost });
            };
            let next = p.simulate(&s, a, &mut rng).expect("applicable");
            history.push(a, next);
        }
        started = true;
        cost += 1;
    }
    let status = if p.is_goal(history.last()) { ExecutionStatus::Success } else { ExecutionStatus::BudgetExhausted };
    Ok(ExecutionOutcome { status, history, cost })
}
