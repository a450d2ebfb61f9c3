#![allow(dead_code)]

pub mod hp;

use std::path::PathBuf;

use lamp::determinize::determinize;
use lamp::landmarks::{extract_landmarks, LandmarkGraph};
use lamp::model::{ActionId, Outcome, ProbAction, Problem};

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden.txt")
}

pub fn landmarks_of(p: &Problem) -> LandmarkGraph {
    extract_landmarks(&determinize(p)).expect("goal reachable")
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("f{i}")).collect()
}

/// A hand-built problem with facts `f0..` and actions given as
/// `(name, precondition, outcomes)`.
/// `(probability, add, delete)`.
pub type OutcomeSpec = (f64, Vec<u32>, Vec<u32>);

pub fn handmade(
    n_facts: usize,
    actions: Vec<(&str, Vec<u32>, Vec<OutcomeSpec>)>,
    init: &[u32],
    goal: &[u32],
) -> Problem {
    use lamp::model::FactId;
    let actions = actions
        .into_iter()
        .enumerate()
        .map(|(i, (name, pre, outs))| ProbAction {
            id: ActionId(i as u32),
            name: name.to_string(),
            precondition: pre.into_iter().map(FactId).collect(),
            outcomes: outs
                .into_iter()
                .map(|(p, add, del)| Outcome::new(p, add.into_iter().map(FactId).collect(), del.into_iter().map(FactId).collect()))
                .collect(),
        })
        .collect();
    Problem::new(
        "handmade",
        names(n_facts),
        actions,
        init.iter().map(|&f| FactId(f)).collect(),
        goal.iter().map(|&f| FactId(f)).collect(),
    )
    .expect("valid problem")
}

pub fn action_names(p: &Problem, acts: &[ActionId]) -> Vec<String> {
    acts.iter().map(|&a| p.action(a).name.clone()).collect()
}
