//! Grounded-problem JSON, for feeding tasks produced by other tools.
//!
//! ```json
//! {
//!   "name": "example",
//!   "facts": ["at(a)", "at(b)"],
//!   "actions": [
//!     {"name": "go", "precondition": [0],
//!      "outcomes": [{"probability": 1.0, "add": [1], "del": [0]}]}
//!   ],
//!   "init": [0],
//!   "goal": [1]
//! }
//! ```
//!
//! Fact references are indices into `facts`. `name` is optional.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ActionId, FactId, ModelError, Outcome, ProbAction, Problem};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed problem JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonOutcome {
    probability: f64,
    #[serde(default)]
    add: Vec<u32>,
    #[serde(default)]
    del: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonAction {
    name: String,
    #[serde(default)]
    precondition: Vec<u32>,
    outcomes: Vec<JsonOutcome>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonProblem {
    #[serde(default)]
    name: String,
    facts: Vec<String>,
    actions: Vec<JsonAction>,
    init: Vec<u32>,
    goal: Vec<u32>,
}

fn ids(v: &[u32]) -> Vec<FactId> {
    v.iter().map(|&i| FactId(i)).collect()
}

fn raw(v: &[FactId]) -> Vec<u32> {
    v.iter().map(|f| f.0).collect()
}

pub fn from_json(text: &str) -> Result<Problem, JsonError> {
    let j: JsonProblem = serde_json::from_str(text)?;
    let actions = j
        .actions
        .iter()
        .map(|a| ProbAction {
            id: ActionId(0),
            name: a.name.clone(),
            precondition: ids(&a.precondition),
            outcomes: a
                .outcomes
                .iter()
                .map(|o| Outcome::new(o.probability, ids(&o.add), ids(&o.del)))
                .collect(),
        })
        .collect();
    Ok(Problem::new(j.name, j.facts, actions, ids(&j.init), ids(&j.goal))?)
}

pub fn to_json(p: &Problem) -> String {
    let j = JsonProblem {
        name: p.name.clone(),
        facts: p.facts.iter().map(|f| f.name.clone()).collect(),
        actions: p
            .actions
            .iter()
            .map(|a| JsonAction {
                name: a.name.clone(),
                precondition: raw(&a.precondition),
                outcomes: a
                    .outcomes
                    .iter()
                    .map(|o| JsonOutcome { probability: o.probability, add: raw(&o.add), del: raw(&o.del) })
                    .collect(),
            })
            .collect(),
        init: p.init.facts().map(|f| f.0).collect(),
        goal: raw(p.goal.facts()),
    };
    serde_json::to_string_pretty(&j).expect("problem serializes")
}
