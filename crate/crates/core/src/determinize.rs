//! All-outcomes determinization.
//!
//! Every outcome of every probabilistic action becomes its own
//! deterministic action over the unchanged state space.

use crate::model::{apply_outcome, ActionId, Condition, FactId, History, Outcome, Problem, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetActionId(pub u32);

impl DetActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetAction {
    pub id: DetActionId,
    /// `<action>__o<k>`.
    pub name: String,
    /// Source action and outcome index.
    pub origin: (ActionId, usize),
    pub precondition: Vec<FactId>,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
}

impl DetAction {
    pub fn is_applicable(&self, s: &State) -> bool {
        s.contains_all(&self.precondition)
    }

    pub fn apply(&self, s: &State) -> State {
        apply_outcome(s, &Outcome { probability: 1.0, add: self.add.clone(), del: self.del.clone() })
    }

    pub fn precondition_condition(&self) -> Condition {
        Condition::conjunction(self.precondition.iter().copied())
    }
}

/// Deterministic view of a [`Problem`]: same facts, init and goal.
#[derive(Debug, Clone)]
pub struct DetProblem<'p> {
    pub source: &'p Problem,
    pub actions: Vec<DetAction>,
    /// `first[a]` is the id of the first determinized copy of action `a`.
    first: Vec<u32>,
}

impl<'p> DetProblem<'p> {
    pub fn n_facts(&self) -> usize {
        self.source.n_facts()
    }

    pub fn init(&self) -> &State {
        &self.source.init
    }

    pub fn goal(&self) -> &Condition {
        &self.source.goal
    }

    pub fn action(&self, id: DetActionId) -> &DetAction {
        &self.actions[id.index()]
    }

    /// The copy of action `a` for outcome `k`.
    pub fn det_id(&self, a: ActionId, k: usize) -> DetActionId {
        DetActionId(self.first[a.index()] + k as u32)
    }

    pub fn applicable(&self, s: &State) -> impl Iterator<Item = &DetAction> + '_ {
        let s = s.clone();
        self.actions.iter().filter(move |d| d.is_applicable(&s))
    }
}

pub fn determinize(p: &Problem) -> DetProblem<'_> {
    let mut actions = Vec::new();
    let mut first = Vec::with_capacity(p.actions.len());
    for a in &p.actions {
        first.push(actions.len() as u32);
        for (k, o) in a.outcomes.iter().enumerate() {
            actions.push(DetAction {
                id: DetActionId(actions.len() as u32),
                name: format!("{}__o{k}", a.name),
                origin: (a.id, k),
                precondition: a.precondition.clone(),
                add: o.add.clone(),
                del: o.del.clone(),
            });
        }
    }
    DetProblem { source: p, actions, first }
}

/// Maps each transition of `h` to a determinized action reproducing it.
///
/// Returns `None` if some transition is produced by no outcome, which
/// means `h` is not a history of the problem.
pub fn lift_history(dp: &DetProblem<'_>, h: &History) -> Option<Vec<DetActionId>> {
    if h.states.len() != h.actions.len() + 1 {
        return None;
    }
    h.actions
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let (s, t) = (&h.states[i], &h.states[i + 1]);
            let action = dp.source.action(a);
            if !action.is_applicable(s) {
                return None;
            }
            // The first outcome that reproduces the successor.
            action
                .outcomes
                .iter()
                .position(|o| apply_outcome(s, o) == *t)
                .map(|k| dp.det_id(a, k))
        })
        .collect()
}

/// Replays a deterministic plan, returning the visited states.
pub fn replay(dp: &DetProblem<'_>, start: &State, plan: &[DetActionId]) -> Option<Vec<State>> {
    let mut states = vec![start.clone()];
    for &d in plan {
        let action = dp.action(d);
        let s = states.last().expect("non-empty");
        if !action.is_applicable(s) {
            return None;
        }
        states.push(action.apply(s));
    }
    Some(states)
}
