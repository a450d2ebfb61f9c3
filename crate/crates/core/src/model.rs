//! Grounded probabilistic STRIPS semantics.
//!
//! A [`Problem`] is immutable once built: dense fact ids, probabilistic
//! actions with unit cost, an initial [`State`] and a conjunctive goal.
//! States are fixed-width bitsets carrying a precomputed hash, since the
//! planner keys its value tables on them.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;
use rustc_hash::{FxHashMap, FxHasher};
use smallvec::SmallVec;
use thiserror::Error;

/// Tolerance on the sum of outcome probabilities of one action.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactId(pub u32);

impl FactId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub id: FactId,
    /// Display name, `pred(arg1,arg2)` or `pred` for nullary atoms.
    pub name: String,
}

impl Fact {
    /// Predicate symbol of the atom this fact was grounded from.
    pub fn predicate(&self) -> &str {
        self.name.split('(').next().unwrap_or(&self.name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("fact id {id} out of range (problem has {n_facts} facts)")]
    FactOutOfRange { id: u32, n_facts: usize },
    #[error("duplicate fact name `{0}`")]
    DuplicateFact(String),
    #[error("action `{action}` has no outcomes")]
    NoOutcomes { action: String },
    #[error("action `{action}`: outcome probabilities sum to {sum}, expected 1")]
    ProbabilitySum { action: String, sum: f64 },
    #[error("action `{action}`: outcome probability {probability} outside [0, 1]")]
    ProbabilityRange { action: String, probability: f64 },
    #[error("action `{action}`: fact {fact} is both added and deleted by one outcome")]
    AddDeleteOverlap { action: String, fact: u32 },
    #[error("condition must not be empty")]
    EmptyCondition,
    #[error("action {0} is not applicable in the given state")]
    Inapplicable(ActionId),
}

type Words = SmallVec<[u64; 4]>;

/// A set of facts under the closed-world assumption.
///
/// All states of one problem share the same word width, so equality and
/// hashing are canonical regardless of insertion order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct State {
    words: Words,
    hash: u64,
}

impl State {
    pub fn empty(n_facts: usize) -> Self {
        let words: Words = SmallVec::from_elem(0, n_facts.div_ceil(64).max(1));
        let mut s = State { words, hash: 0 };
        s.rehash();
        s
    }

    pub fn from_facts(n_facts: usize, facts: impl IntoIterator<Item = FactId>) -> Self {
        let mut s = State::empty(n_facts);
        for f in facts {
            s.set(f);
        }
        s.rehash();
        s
    }

    fn set(&mut self, f: FactId) {
        self.words[f.index() / 64] |= 1 << (f.index() % 64);
    }

    fn clear(&mut self, f: FactId) {
        self.words[f.index() / 64] &= !(1 << (f.index() % 64));
    }

    fn rehash(&mut self) {
        let mut h = FxHasher::default();
        self.words.hash(&mut h);
        self.hash = h.finish();
    }

    pub fn contains(&self, f: FactId) -> bool {
        self.words
            .get(f.index() / 64)
            .is_some_and(|w| w & (1 << (f.index() % 64)) != 0)
    }

    pub fn contains_all(&self, facts: &[FactId]) -> bool {
        facts.iter().all(|&f| self.contains(f))
    }

    pub fn contains_any(&self, facts: &[FactId]) -> bool {
        facts.iter().any(|&f| self.contains(f))
    }

    pub fn facts(&self) -> impl Iterator<Item = FactId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64u32)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| FactId(wi as u32 * 64 + b))
        })
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Highest representable fact id plus one.
    pub fn capacity(&self) -> usize {
        self.words.len() * 64
    }
}

impl Hash for State {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.facts().map(|f| f.0)).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionKind {
    Conjunction,
    Disjunction,
}

/// A conjunction or disjunction of facts, kept sorted and deduplicated.
///
/// Singletons are always stored as conjunctions so that a one-fact
/// disjunction compares equal to the fact itself. An empty conjunction is
/// the trivially true condition (used for empty preconditions and goals).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    kind: ConditionKind,
    facts: Vec<FactId>,
}

impl Condition {
    pub fn conjunction(facts: impl IntoIterator<Item = FactId>) -> Self {
        let set: BTreeSet<FactId> = facts.into_iter().collect();
        Condition {
            kind: ConditionKind::Conjunction,
            facts: set.into_iter().collect(),
        }
    }

    pub fn disjunction(facts: impl IntoIterator<Item = FactId>) -> Result<Self, ModelError> {
        let set: BTreeSet<FactId> = facts.into_iter().collect();
        match set.len() {
            0 => Err(ModelError::EmptyCondition),
            1 => Ok(Condition::conjunction(set)),
            _ => Ok(Condition {
                kind: ConditionKind::Disjunction,
                facts: set.into_iter().collect(),
            }),
        }
    }

    pub fn fact(f: FactId) -> Self {
        Condition {
            kind: ConditionKind::Conjunction,
            facts: vec![f],
        }
    }

    pub fn kind(&self) -> ConditionKind {
        self.kind
    }

    pub fn facts(&self) -> &[FactId] {
        &self.facts
    }

    pub fn is_disjunctive(&self) -> bool {
        self.kind == ConditionKind::Disjunction
    }

    pub fn is_satisfied(&self, s: &State) -> bool {
        match self.kind {
            ConditionKind::Conjunction => s.contains_all(&self.facts),
            ConditionKind::Disjunction => s.contains_any(&self.facts),
        }
    }

    pub fn display<'a>(&'a self, p: &'a Problem) -> impl fmt::Display + 'a {
        ConditionDisplay { cond: self, problem: p }
    }
}

struct ConditionDisplay<'a> {
    cond: &'a Condition,
    problem: &'a Problem,
}

impl fmt::Display for ConditionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match self.cond.kind {
            ConditionKind::Conjunction => " & ",
            ConditionKind::Disjunction => " | ",
        };
        if self.cond.facts.is_empty() {
            return write!(f, "true");
        }
        for (i, fact) in self.cond.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            f.write_str(&self.problem.facts[fact.index()].name)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
}

impl Outcome {
    pub fn new(probability: f64, add: Vec<FactId>, del: Vec<FactId>) -> Self {
        let mut add = add;
        let mut del = del;
        add.sort_unstable();
        add.dedup();
        del.sort_unstable();
        del.dedup();
        Outcome { probability, add, del }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbAction {
    pub id: ActionId,
    pub name: String,
    /// Conjunctive precondition; empty means always applicable.
    pub precondition: Vec<FactId>,
    pub outcomes: Vec<Outcome>,
}

impl ProbAction {
    pub fn cost(&self) -> u32 {
        1
    }

    pub fn is_applicable(&self, s: &State) -> bool {
        s.contains_all(&self.precondition)
    }
}

/// `(s \ del) ∪ add`.
pub fn apply_outcome(s: &State, o: &Outcome) -> State {
    let mut next = s.clone();
    for &f in &o.del {
        if f.index() < next.capacity() {
            next.clear(f);
        }
    }
    for &f in &o.add {
        next.set(f);
    }
    next.rehash();
    next
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub facts: Vec<Fact>,
    pub actions: Vec<ProbAction>,
    pub init: State,
    pub goal: Condition,
    fact_index: FxHashMap<String, FactId>,
}

impl Problem {
    /// Validates ids, probability sums and add/delete disjointness.
    pub fn new(
        name: impl Into<String>,
        fact_names: Vec<String>,
        actions: Vec<ProbAction>,
        init: Vec<FactId>,
        goal: Vec<FactId>,
    ) -> Result<Self, ModelError> {
        let n = fact_names.len();
        let mut fact_index = FxHashMap::default();
        let mut facts = Vec::with_capacity(n);
        for (i, name) in fact_names.into_iter().enumerate() {
            if fact_index.insert(name.clone(), FactId(i as u32)).is_some() {
                return Err(ModelError::DuplicateFact(name));
            }
            facts.push(Fact { id: FactId(i as u32), name });
        }
        let check = |f: FactId| {
            if f.index() < n {
                Ok(())
            } else {
                Err(ModelError::FactOutOfRange { id: f.0, n_facts: n })
            }
        };
        let mut actions = actions;
        for (i, a) in actions.iter_mut().enumerate() {
            a.id = ActionId(i as u32);
            a.precondition.sort_unstable();
            a.precondition.dedup();
            a.precondition.iter().try_for_each(|&f| check(f))?;
            if a.outcomes.is_empty() {
                return Err(ModelError::NoOutcomes { action: a.name.clone() });
            }
            let mut sum = 0.0;
            for o in &a.outcomes {
                if !(0.0..=1.0 + PROBABILITY_TOLERANCE).contains(&o.probability) {
                    return Err(ModelError::ProbabilityRange {
                        action: a.name.clone(),
                        probability: o.probability,
                    });
                }
                sum += o.probability;
                o.add.iter().chain(&o.del).try_for_each(|&f| check(f))?;
                if let Some(f) = o.add.iter().find(|f| o.del.contains(f)) {
                    return Err(ModelError::AddDeleteOverlap { action: a.name.clone(), fact: f.0 });
                }
            }
            if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(ModelError::ProbabilitySum { action: a.name.clone(), sum });
            }
        }
        init.iter().chain(&goal).try_for_each(|&f| check(f))?;
        Ok(Problem {
            name: name.into(),
            init: State::from_facts(n, init),
            goal: Condition::conjunction(goal),
            facts,
            actions,
            fact_index,
        })
    }

    pub fn n_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn fact_id(&self, name: &str) -> Option<FactId> {
        self.fact_index.get(name).copied()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().find(|a| a.name == name).map(|a| a.id)
    }

    pub fn action(&self, id: ActionId) -> &ProbAction {
        &self.actions[id.index()]
    }

    pub fn is_goal(&self, s: &State) -> bool {
        self.goal.is_satisfied(s)
    }

    pub fn state(&self, facts: impl IntoIterator<Item = FactId>) -> State {
        State::from_facts(self.n_facts(), facts)
    }

    /// Builds a state from fact names; unknown names are a programming error.
    pub fn state_of(&self, names: &[&str]) -> State {
        self.state(names.iter().map(|n| {
            self.fact_id(n)
                .unwrap_or_else(|| panic!("unknown fact `{n}`"))
        }))
    }

    pub fn applicable(&self, s: &State) -> Vec<ActionId> {
        self.actions
            .iter()
            .filter(|a| a.is_applicable(s))
            .map(|a| a.id)
            .collect()
    }

    /// Samples one outcome of `a` and returns the successor.
    ///
    /// Single-outcome actions do not draw from `rng`.
    pub fn simulate<R: Rng + ?Sized>(
        &self,
        s: &State,
        a: ActionId,
        rng: &mut R,
    ) -> Result<State, ModelError> {
        let action = self.action(a);
        if !action.is_applicable(s) {
            return Err(ModelError::Inapplicable(a));
        }
        let idx = sample_outcome(action, rng);
        Ok(apply_outcome(s, &action.outcomes[idx]))
    }

    /// Like [`Problem::simulate`], also returning the sampled outcome index.
    pub fn simulate_outcome<R: Rng + ?Sized>(
        &self,
        s: &State,
        a: ActionId,
        rng: &mut R,
    ) -> Result<(usize, State), ModelError> {
        let action = self.action(a);
        if !action.is_applicable(s) {
            return Err(ModelError::Inapplicable(a));
        }
        let idx = sample_outcome(action, rng);
        Ok((idx, apply_outcome(s, &action.outcomes[idx])))
    }

    /// Successor distribution of `a` in `s`, merged over equal successors
    /// and sorted by state.
    pub fn successor_distribution(&self, s: &State, a: ActionId) -> Vec<(State, f64)> {
        let mut dist: Vec<(State, f64)> = Vec::new();
        for o in &self.action(a).outcomes {
            let next = apply_outcome(s, o);
            match dist.iter_mut().find(|(t, _)| *t == next) {
                Some((_, p)) => *p += o.probability,
                None => dist.push((next, o.probability)),
            }
        }
        dist.sort_by(|a, b| a.0.cmp(&b.0));
        dist
    }

    /// Keeps one representative (lowest id) per class of candidates with
    /// identical successor distributions from `s`. Result is sorted by id.
    pub fn prune_actions(&self, s: &State, candidates: &[ActionId]) -> Vec<ActionId> {
        let mut sorted = candidates.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut seen: FxHashMap<Vec<(State, i64)>, ActionId> = FxHashMap::default();
        let mut kept = Vec::with_capacity(sorted.len());
        for a in sorted {
            let key: Vec<(State, i64)> = self
                .successor_distribution(s, a)
                .into_iter()
                .map(|(t, p)| (t, (p / PROBABILITY_TOLERANCE).round() as i64))
                .collect();
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(a);
                kept.push(a);
            }
        }
        kept
    }

    /// Applicable actions after duplicate-distribution pruning.
    pub fn pruned_applicable(&self, s: &State) -> Vec<ActionId> {
        let app = self.applicable(s);
        if app.len() <= 1 {
            return app;
        }
        self.prune_actions(s, &app)
    }
}

fn sample_outcome<R: Rng + ?Sized>(action: &ProbAction, rng: &mut R) -> usize {
    if action.outcomes.len() == 1 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, o) in action.outcomes.iter().enumerate() {
        acc += o.probability;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` above the cumulative sum; take the last outcome
    // with positive mass.
    action
        .outcomes
        .iter()
        .rposition(|o| o.probability > 0.0)
        .unwrap_or(action.outcomes.len() - 1)
}

/// A state sequence from the initial state together with the actions that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub states: Vec<State>,
    pub actions: Vec<ActionId>,
}

impl History {
    pub fn new(start: State) -> Self {
        History { states: vec![start], actions: Vec::new() }
    }

    pub fn push(&mut self, a: ActionId, s: State) {
        self.actions.push(a);
        self.states.push(s);
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("history is never empty")
    }

    /// Every recorded transition is produced by some outcome of its action.
    pub fn is_valid(&self, p: &Problem) -> bool {
        self.states.len() == self.actions.len() + 1
            && self.actions.iter().enumerate().all(|(i, &a)| {
                let (s, t) = (&self.states[i], &self.states[i + 1]);
                p.action(a).is_applicable(s)
                    && p.action(a).outcomes.iter().any(|o| apply_outcome(s, o) == *t)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(i: u32) -> FactId {
        FactId(i)
    }

    fn action(name: &str, pre: &[u32], outcomes: Vec<Outcome>) -> ProbAction {
        ProbAction {
            id: ActionId(0),
            name: name.into(),
            precondition: pre.iter().map(|&i| f(i)).collect(),
            outcomes,
        }
    }

    fn det(add: &[u32], del: &[u32]) -> Outcome {
        Outcome::new(1.0, add.iter().map(|&i| f(i)).collect(), del.iter().map(|&i| f(i)).collect())
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn apply_outcome_examples() {
        let s = State::from_facts(8, [f(1), f(2)]);
        assert_eq!(apply_outcome(&s, &det(&[3], &[2])), State::from_facts(8, [f(1), f(3)]));
        assert_eq!(apply_outcome(&s, &det(&[], &[])), s);
        let s1 = State::from_facts(8, [f(1)]);
        assert_eq!(apply_outcome(&s1, &det(&[], &[5])), s1);
    }

    #[test]
    fn state_equality_is_order_independent() {
        let a = State::from_facts(70, [f(3), f(65), f(1)]);
        let b = State::from_facts(70, [f(65), f(1), f(3)]);
        assert_eq!(a, b);
        let mut ha = FxHasher::default();
        let mut hb = FxHasher::default();
        a.hash(&mut ha);
        b.hash(&mut hb);
        assert_eq!(ha.finish(), hb.finish());
        assert_eq!(a.facts().collect::<Vec<_>>(), vec![f(1), f(3), f(65)]);
    }

    #[test]
    fn applicable_examples() {
        let p = Problem::new(
            "t",
            names(2),
            vec![action("needs0", &[0], vec![det(&[1], &[])]), action("free", &[], vec![det(&[0], &[])])],
            vec![],
            vec![f(1)],
        )
        .unwrap();
        let empty = p.state([]);
        assert_eq!(p.applicable(&empty), vec![ActionId(1)]);
        let s0 = p.state([f(0)]);
        assert_eq!(p.applicable(&s0), vec![ActionId(0), ActionId(1)]);
    }

    #[test]
    fn simulate_rejects_inapplicable() {
        let p = Problem::new("t", names(2), vec![action("a", &[0], vec![det(&[1], &[])])], vec![], vec![f(1)])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(p.simulate(&p.init, ActionId(0), &mut rng), Err(ModelError::Inapplicable(_))));
        let s = p.state([f(0)]);
        assert_eq!(p.simulate(&s, ActionId(0), &mut rng).unwrap(), p.state([f(0), f(1)]));
    }

    #[test]
    fn construction_checks_probabilities() {
        let bad = action(
            "bad",
            &[],
            vec![Outcome::new(0.5, vec![f(0)], vec![]), Outcome::new(0.6, vec![], vec![])],
        );
        assert!(matches!(
            Problem::new("t", names(1), vec![bad], vec![], vec![]),
            Err(ModelError::ProbabilitySum { .. })
        ));
        let overlap = action("o", &[], vec![det(&[0], &[0])]);
        assert!(matches!(
            Problem::new("t", names(1), vec![overlap], vec![], vec![]),
            Err(ModelError::AddDeleteOverlap { .. })
        ));
        assert!(matches!(
            Problem::new("t", names(1), vec![], vec![f(4)], vec![]),
            Err(ModelError::FactOutOfRange { .. })
        ));
    }

    #[test]
    fn condition_semantics() {
        let s = State::from_facts(4, [f(0), f(2)]);
        assert!(Condition::conjunction([f(0), f(2)]).is_satisfied(&s));
        assert!(!Condition::conjunction([f(0), f(1)]).is_satisfied(&s));
        assert!(Condition::disjunction([f(1), f(2)]).unwrap().is_satisfied(&s));
        assert!(!Condition::disjunction([f(1), f(3)]).unwrap().is_satisfied(&s));
        assert_eq!(Condition::disjunction([f(2), f(2)]).unwrap(), Condition::fact(f(2)));
        assert!(Condition::disjunction([]).is_err());
        assert!(Condition::conjunction([]).is_satisfied(&s));
    }

    fn pruning_problem() -> Problem {
        // a0 and a1 both add fact 1 (different syntax: a1 also deletes an
        // absent fact); a2 adds 2; a3 is a 50/50 coin with the same
        // distribution as a4 listed in the other order.
        let coin = |first: u32, second: u32| {
            vec![
                Outcome::new(0.5, vec![f(first)], vec![]),
                Outcome::new(0.5, vec![f(second)], vec![]),
            ]
        };
        Problem::new(
            "prune",
            names(5),
            vec![
                action("a0", &[0], vec![det(&[1], &[])]),
                action("a1", &[0], vec![det(&[1], &[4])]),
                action("a2", &[0], vec![det(&[2], &[])]),
                action("a3", &[0], coin(1, 3)),
                action("a4", &[0], coin(3, 1)),
                action("a5", &[], vec![det(&[1], &[3])]),
            ],
            vec![f(0)],
            vec![f(1)],
        )
        .unwrap()
    }

    #[test]
    fn prune_keeps_lowest_id_per_class() {
        let p = pruning_problem();
        let s = p.init.clone();
        let app = p.applicable(&s);
        assert_eq!(app.len(), 6);
        // a0, a1 and a5 all map s deterministically to {0, 1}.
        assert_eq!(p.prune_actions(&s, &app), vec![ActionId(0), ActionId(2), ActionId(3)]);
        // All-distinct candidates are left alone.
        let distinct = [ActionId(0), ActionId(2), ActionId(3)];
        assert_eq!(p.prune_actions(&s, &distinct), distinct.to_vec());
    }

    #[test]
    fn prune_three_way_class_matches_enumerated_distributions() {
        // Oracle: group by the explicit successor map.
        let p = pruning_problem();
        let s = p.init.clone();
        let app = p.applicable(&s);
        type Dist = Vec<(Vec<FactId>, i64)>;
        let mut classes: Vec<(Dist, Vec<ActionId>)> = Vec::new();
        for &a in &app {
            let mut d: Vec<(Vec<FactId>, i64)> = p
                .successor_distribution(&s, a)
                .into_iter()
                .map(|(t, pr)| (t.facts().collect(), (pr * 1e9).round() as i64))
                .collect();
            d.sort();
            match classes.iter_mut().find(|(k, _)| *k == d) {
                Some((_, members)) => members.push(a),
                None => classes.push((d, vec![a])),
            }
        }
        let three = classes.iter().find(|(_, m)| m.len() == 3).expect("a 3-way class");
        let kept = p.prune_actions(&s, &app);
        let survivors: Vec<_> = three.1.iter().filter(|a| kept.contains(a)).collect();
        assert_eq!(survivors, vec![three.1.iter().min().unwrap()]);
    }

    #[test]
    fn prune_is_idempotent() {
        let p = pruning_problem();
        let s = p.init.clone();
        let mut app = p.applicable(&s);
        let once = p.prune_actions(&s, &app);
        assert_eq!(p.prune_actions(&s, &once), once);
        app.reverse();
        assert_eq!(p.prune_actions(&s, &app), once);
    }

    #[test]
    fn history_validity() {
        let p = pruning_problem();
        let mut h = History::new(p.init.clone());
        assert!(h.is_valid(&p));
        h.push(ActionId(2), p.state([f(0), f(2)]));
        assert!(h.is_valid(&p));
        h.push(ActionId(3), p.state([f(0), f(4)]));
        assert!(!h.is_valid(&p));
    }
}
