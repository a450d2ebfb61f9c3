//! Landmarks, their orderings and the graph algebra used by the planner.
//!
//! Extraction works on the all-outcomes determinization. The graph always
//! carries a dedicated goal node that every other landmark precedes; those
//! goal edges are implicit and never appear in [`LandmarkGraph::orderings`].

mod extract;
pub mod rpg;

use std::fmt::{self, Write};

use smallvec::SmallVec;

use crate::model::{Condition, Problem, State};

pub use extract::{extract_landmarks, LandmarkError, MAX_DISJUNCTION_SIZE};
pub use rpg::{build_rpg, build_rpg_excluding, RelaxedPlanningGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LandmarkId(pub u32);

impl LandmarkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Landmark {
    pub id: LandmarkId,
    pub condition: Condition,
    pub is_goal_node: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderingKind {
    Natural,
    GreedyNecessary,
    Necessary,
}

impl OrderingKind {
    /// Cycle breaking discards the weakest edge first.
    pub fn strength(self) -> u8 {
        match self {
            OrderingKind::Natural => 0,
            OrderingKind::GreedyNecessary => 1,
            OrderingKind::Necessary => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OrderingKind::Natural => "nat",
            OrderingKind::GreedyNecessary => "gn",
            OrderingKind::Necessary => "nec",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ordering {
    pub from: LandmarkId,
    pub to: LandmarkId,
    pub kind: OrderingKind,
}

/// A set of landmark ids, canonical for hashing and comparison.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LandmarkSet {
    words: SmallVec<[u64; 2]>,
}

impl LandmarkSet {
    pub fn new() -> Self {
        LandmarkSet::default()
    }

    /// `{0, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = LandmarkSet::new();
        for i in 0..n {
            s.insert(LandmarkId(i as u32));
        }
        s
    }

    pub fn insert(&mut self, id: LandmarkId) {
        let w = id.index() / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (id.index() % 64);
    }

    pub fn remove(&mut self, id: LandmarkId) {
        let w = id.index() / 64;
        if w < self.words.len() {
            self.words[w] &= !(1 << (id.index() % 64));
            while self.words.last() == Some(&0) {
                self.words.pop();
            }
        }
    }

    pub fn without(&self, id: LandmarkId) -> Self {
        let mut s = self.clone();
        s.remove(id);
        s
    }

    pub fn contains(&self, id: LandmarkId) -> bool {
        self.words
            .get(id.index() / 64)
            .is_some_and(|w| w & (1 << (id.index() % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = LandmarkId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64u32)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| LandmarkId(wi as u32 * 64 + b))
        })
    }
}

impl fmt::Debug for LandmarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}

impl FromIterator<LandmarkId> for LandmarkSet {
    fn from_iter<I: IntoIterator<Item = LandmarkId>>(iter: I) -> Self {
        let mut s = LandmarkSet::new();
        for id in iter {
            s.insert(id);
        }
        s
    }
}

/// Landmarks with a strict partial order. The goal node is the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkGraph {
    landmarks: Vec<Landmark>,
    orderings: Vec<Ordering>,
    /// Explicit predecessors per landmark (goal node excluded).
    preds: Vec<Vec<LandmarkId>>,
}

impl LandmarkGraph {
    /// Builds a graph from non-goal conditions, explicit orderings among
    /// them, and the goal. Panics if the orderings contain a cycle or an
    /// out-of-range id.
    pub fn new(conditions: Vec<Condition>, orderings: Vec<Ordering>, goal: Condition) -> Self {
        let n = conditions.len();
        let mut landmarks: Vec<Landmark> = conditions
            .into_iter()
            .enumerate()
            .map(|(i, condition)| Landmark { id: LandmarkId(i as u32), condition, is_goal_node: false })
            .collect();
        landmarks.push(Landmark { id: LandmarkId(n as u32), condition: goal, is_goal_node: true });
        let mut preds = vec![Vec::new(); n + 1];
        for o in &orderings {
            assert!(o.from.index() < n && o.to.index() < n, "ordering {o:?} out of range");
            if !preds[o.to.index()].contains(&o.from) {
                preds[o.to.index()].push(o.from);
            }
        }
        let g = LandmarkGraph { landmarks, orderings, preds };
        assert!(g.is_acyclic(), "landmark orderings must form a DAG");
        g
    }

    /// The graph holding only the goal node.
    pub fn goal_only(p: &Problem) -> Self {
        LandmarkGraph::new(Vec::new(), Vec::new(), p.goal.clone())
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    pub fn orderings(&self) -> &[Ordering] {
        &self.orderings
    }

    pub fn landmark(&self, id: LandmarkId) -> &Landmark {
        &self.landmarks[id.index()]
    }

    pub fn condition(&self, id: LandmarkId) -> &Condition {
        &self.landmarks[id.index()].condition
    }

    pub fn goal_node(&self) -> LandmarkId {
        LandmarkId(self.landmarks.len() as u32 - 1)
    }

    /// Non-goal landmarks.
    pub fn nontrivial(&self) -> &[Landmark] {
        &self.landmarks[..self.landmarks.len() - 1]
    }

    pub fn all(&self) -> LandmarkSet {
        LandmarkSet::full(self.landmarks.len())
    }

    /// Whether `a ≺ b` is a direct edge (including the implicit goal edges).
    pub fn precedes(&self, a: LandmarkId, b: LandmarkId) -> bool {
        if a == b {
            return false;
        }
        if b == self.goal_node() {
            return true;
        }
        self.preds[b.index()].contains(&a)
    }

    /// Members of `remaining` with no predecessor inside `remaining`.
    pub fn leaves(&self, remaining: &LandmarkSet) -> Vec<LandmarkId> {
        let goal = self.goal_node();
        remaining
            .iter()
            .filter(|&l| {
                if l == goal {
                    remaining.iter().all(|m| m == goal)
                } else {
                    !self.preds[l.index()].iter().any(|&p| remaining.contains(p))
                }
            })
            .collect()
    }

    fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over the explicit edges.
        let n = self.landmarks.len();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut succ = vec![Vec::new(); n];
        for (to, ps) in self.preds.iter().enumerate() {
            for p in ps {
                succ[p.index()].push(to);
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == n
    }

    /// Landmarks satisfied by `s` other than the goal node.
    pub fn satisfied_in(&self, s: &State) -> Vec<LandmarkId> {
        self.nontrivial()
            .iter()
            .filter(|l| l.condition.is_satisfied(s))
            .map(|l| l.id)
            .collect()
    }

    /// Graphviz rendering; edge style encodes the ordering kind.
    pub fn to_dot(&self, p: &Problem) -> String {
        let mut s = String::from("digraph landmarks {\n  rankdir=LR;\n");
        for l in &self.landmarks {
            let shape = if l.is_goal_node { "doubleoctagon" } else if l.condition.is_disjunctive() { "ellipse" } else { "box" };
            let label = l.condition.display(p).to_string().replace('"', "\\\"");
            writeln!(s, "  lm{} [shape={shape}, label=\"{label}\"];", l.id.0).unwrap();
        }
        for o in &self.orderings {
            let style = match o.kind {
                OrderingKind::Natural => "dotted",
                OrderingKind::GreedyNecessary => "dashed",
                OrderingKind::Necessary => "solid",
            };
            writeln!(s, "  lm{} -> lm{} [style={style}, label=\"{}\"];", o.from.0, o.to.0, o.kind.label()).unwrap();
        }
        let goal = self.goal_node();
        for l in self.nontrivial() {
            writeln!(s, "  lm{} -> lm{} [style=bold, color=gray];", l.id.0, goal.0).unwrap();
        }
        s.push_str("}\n");
        s
    }
}
