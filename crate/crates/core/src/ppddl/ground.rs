//! Grounding of lifted domains into [`crate::model::Problem`]s.

use std::collections::{BTreeMap, HashSet};

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::ast::{ActionSchema, Atom, Domain, Effect, Problem as LiftedProblem, Term};
use super::parser::check_problem;
use super::Diagnostic;
use crate::landmarks::rpg::relaxed_levels;
use crate::model::{FactId, ModelError, Outcome, ProbAction, Problem, ActionId, PROBABILITY_TOLERANCE};

/// Upper bound on the number of ground actions before grounding aborts.
pub const MAX_GROUND_ACTIONS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum GroundError {
    #[error(transparent)]
    Invalid(#[from] Diagnostic),
    #[error("grounding explosion: schema `{schema}` pushed the ground action count past {limit} (reached {count})")]
    Explosion { schema: String, count: usize, limit: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn atom_name(predicate: &str, args: &[&str]) -> String {
    if args.is_empty() {
        predicate.to_string()
    } else {
        format!("{predicate}({})", args.join(","))
    }
}

fn ground_atom(atom: &Atom, binding: &FxHashMap<&str, &str>) -> String {
    let args: Vec<&str> = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => binding[v.as_str()],
            Term::Const(c) => c.as_str(),
        })
        .collect();
    atom_name(&atom.predicate, &args)
}

fn collect_effect_predicates<'a>(e: &'a Effect, out: &mut HashSet<&'a str>) {
    match e {
        Effect::And(es) => es.iter().for_each(|e| collect_effect_predicates(e, out)),
        Effect::Add(a) | Effect::Del(a) => {
            out.insert(a.predicate.as_str());
        }
        Effect::Probabilistic(bs) => bs.iter().for_each(|(_, e)| collect_effect_predicates(e, out)),
    }
}

/// One flattened branch: probability plus literals `(is_add, atom)`.
type Branch = (f64, Vec<(bool, String)>);

fn flatten(e: &Effect, binding: &FxHashMap<&str, &str>) -> Vec<Branch> {
    match e {
        Effect::Add(a) => vec![(1.0, vec![(true, ground_atom(a, binding))])],
        Effect::Del(a) => vec![(1.0, vec![(false, ground_atom(a, binding))])],
        Effect::And(es) => {
            let mut acc: Vec<Branch> = vec![(1.0, Vec::new())];
            for child in es {
                let parts = flatten(child, binding);
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for (p, lits) in &acc {
                    for (q, more) in &parts {
                        let mut l = lits.clone();
                        l.extend(more.iter().cloned());
                        next.push((p * q, l));
                    }
                }
                acc = next;
            }
            acc
        }
        Effect::Probabilistic(bs) => {
            let mut out = Vec::new();
            let mut total = 0.0;
            for (w, child) in bs {
                total += w;
                for (p, lits) in flatten(child, binding) {
                    out.push((w * p, lits));
                }
            }
            let residual = 1.0 - total;
            if residual > PROBABILITY_TOLERANCE {
                out.push((residual, Vec::new()));
            }
            out
        }
    }
}

struct GroundAction {
    name: String,
    pre: Vec<String>,
    // (probability, add, del) with del already reduced by add.
    outcomes: Vec<(f64, Vec<String>, Vec<String>)>,
}

fn outcomes_of(effect: &Effect, binding: &FxHashMap<&str, &str>) -> Vec<(f64, Vec<String>, Vec<String>)> {
    // Merge branches with identical effects; BTreeMap keeps the order stable.
    let mut merged: Vec<(f64, Vec<String>, Vec<String>)> = Vec::new();
    let mut index: BTreeMap<(Vec<String>, Vec<String>), usize> = BTreeMap::new();
    for (p, lits) in flatten(effect, binding) {
        let mut add: Vec<String> = lits.iter().filter(|l| l.0).map(|l| l.1.clone()).collect();
        add.sort();
        add.dedup();
        let mut del: Vec<String> = lits
            .iter()
            .filter(|l| !l.0 && add.binary_search(&l.1).is_err())
            .map(|l| l.1.clone())
            .collect();
        del.sort();
        del.dedup();
        let key = (add.clone(), del.clone());
        match index.get(&key) {
            Some(&i) => merged[i].0 += p,
            None => {
                index.insert(key, merged.len());
                merged.push((p, add, del));
            }
        }
    }
    merged
}

struct Grounder<'a> {
    domain: &'a Domain,
    objects: Vec<(&'a str, &'a str)>,
    static_preds: HashSet<&'a str>,
    static_true: HashSet<String>,
    out: Vec<GroundAction>,
}

impl<'a> Grounder<'a> {
    fn candidates(&self, ty: &str) -> Vec<&'a str> {
        self.objects
            .iter()
            .filter(|(_, t)| self.domain.is_subtype(t, ty))
            .map(|(n, _)| *n)
            .collect()
    }

    fn schema(&mut self, a: &'a ActionSchema) -> Result<(), GroundError> {
        let domains: Vec<Vec<&'a str>> = a.params.iter().map(|p| self.candidates(&p.ty)).collect();
        // Static precondition atoms become checkable once their last
        // variable is bound; index them by that parameter position.
        let mut checks: Vec<Vec<&'a Atom>> = vec![Vec::new(); a.params.len() + 1];
        for atom in &a.precondition {
            if !self.static_preds.contains(atom.predicate.as_str()) {
                continue;
            }
            let last = atom
                .args
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => a.params.iter().position(|p| p.name == *v).map(|i| i + 1),
                    Term::Const(_) => None,
                })
                .max()
                .unwrap_or(0);
            checks[last].push(atom);
        }
        let mut binding: FxHashMap<&str, &str> = FxHashMap::default();
        let ok0 = checks[0]
            .iter()
            .all(|atom| self.static_true.contains(&ground_atom(atom, &binding)));
        if ok0 {
            self.bind(a, &domains, &checks, 0, &mut binding)?;
        }
        Ok(())
    }

    fn bind(
        &mut self,
        a: &'a ActionSchema,
        domains: &[Vec<&'a str>],
        checks: &[Vec<&'a Atom>],
        depth: usize,
        binding: &mut FxHashMap<&'a str, &'a str>,
    ) -> Result<(), GroundError> {
        if depth == a.params.len() {
            self.emit(a, binding)?;
            return Ok(());
        }
        for &obj in &domains[depth] {
            binding.insert(a.params[depth].name.as_str(), obj);
            let ok = checks[depth + 1]
                .iter()
                .all(|atom| self.static_true.contains(&ground_atom(atom, binding)));
            if ok {
                self.bind(a, domains, checks, depth + 1, binding)?;
            }
        }
        binding.remove(a.params[depth].name.as_str());
        Ok(())
    }

    fn emit(&mut self, a: &ActionSchema, binding: &FxHashMap<&str, &str>) -> Result<(), GroundError> {
        if self.out.len() >= MAX_GROUND_ACTIONS {
            return Err(GroundError::Explosion {
                schema: a.name.clone(),
                count: self.out.len() + 1,
                limit: MAX_GROUND_ACTIONS,
            });
        }
        let args: Vec<&str> = a.params.iter().map(|p| binding[p.name.as_str()]).collect();
        let pre = a
            .precondition
            .iter()
            .filter(|atom| !self.static_preds.contains(atom.predicate.as_str()))
            .map(|atom| ground_atom(atom, binding))
            .collect();
        self.out.push(GroundAction {
            name: atom_name(&a.name, &args),
            pre,
            outcomes: outcomes_of(&a.effect, binding),
        });
        Ok(())
    }
}

/// Instantiates every schema over the problem objects, flattens nested
/// probabilistic effects, and drops actions that are unreachable under the
/// delete relaxation. Static predicates are compiled away.
pub fn ground(d: &Domain, p: &LiftedProblem) -> Result<Problem, GroundError> {
    check_problem(d, p)?;
    let mut fluent = HashSet::new();
    for a in &d.actions {
        collect_effect_predicates(&a.effect, &mut fluent);
    }
    let static_preds: HashSet<&str> = d
        .predicates
        .iter()
        .map(|p| p.name.as_str())
        .filter(|n| !fluent.contains(n))
        .collect();
    let empty = FxHashMap::default();
    let mut static_true = HashSet::new();
    let mut init_fluents = Vec::new();
    for atom in &p.init {
        let name = ground_atom(atom, &empty);
        if static_preds.contains(atom.predicate.as_str()) {
            static_true.insert(name);
        } else {
            init_fluents.push(name);
        }
    }
    let objects: Vec<(&str, &str)> = d
        .constants
        .iter()
        .chain(&p.objects)
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();
    let mut g = Grounder { domain: d, objects, static_preds, static_true, out: Vec::new() };
    for a in &d.actions {
        g.schema(a)?;
    }
    let goal: Vec<String> = p
        .goal
        .iter()
        .filter(|atom| {
            // Static goal atoms that hold are trivially satisfied; false
            // ones stay as never-reachable facts.
            !(g.static_preds.contains(atom.predicate.as_str())
                && g.static_true.contains(&ground_atom(atom, &empty)))
        })
        .map(|atom| ground_atom(atom, &empty))
        .collect();

    // Provisional fact numbering by first appearance.
    let mut ids: FxHashMap<String, FactId> = FxHashMap::default();
    let mut names: Vec<String> = Vec::new();
    let mut intern = |n: &String, ids: &mut FxHashMap<String, FactId>| -> FactId {
        *ids.entry(n.clone()).or_insert_with(|| {
            names.push(n.clone());
            FactId(names.len() as u32 - 1)
        })
    };
    let init_ids: Vec<FactId> = init_fluents.iter().map(|n| intern(n, &mut ids)).collect();
    let goal_ids: Vec<FactId> = goal.iter().map(|n| intern(n, &mut ids)).collect();
    let mut pre_ids = Vec::with_capacity(g.out.len());
    let mut add_ids = Vec::with_capacity(g.out.len());
    for a in &g.out {
        pre_ids.push(a.pre.iter().map(|n| intern(n, &mut ids)).collect::<Vec<_>>());
        let mut adds: Vec<FactId> = a
            .outcomes
            .iter()
            .flat_map(|o| o.1.iter())
            .map(|n| intern(n, &mut ids))
            .collect();
        adds.sort_unstable();
        adds.dedup();
        add_ids.push(adds);
    }
    let n_provisional = names.len();
    let pre_refs: Vec<&[FactId]> = pre_ids.iter().map(Vec::as_slice).collect();
    let add_refs: Vec<&[FactId]> = add_ids.iter().map(Vec::as_slice).collect();
    let (fact_level, action_level) =
        relaxed_levels(n_provisional, init_ids.iter().copied(), &pre_refs, &add_refs, |_| true);

    // Compact: reachable facts plus goal facts, in provisional order.
    let mut keep_goal = vec![false; n_provisional];
    for f in &goal_ids {
        keep_goal[f.index()] = true;
    }
    let mut remap: Vec<Option<FactId>> = vec![None; n_provisional];
    let mut final_names = Vec::new();
    for i in 0..n_provisional {
        if fact_level[i].is_some() || keep_goal[i] {
            remap[i] = Some(FactId(final_names.len() as u32));
            final_names.push(names[i].clone());
        }
    }
    let lookup = |n: &String| ids.get(n).and_then(|f| remap[f.index()]);
    let mut actions = Vec::new();
    for (i, a) in g.out.iter().enumerate() {
        if action_level[i].is_none() {
            continue;
        }
        let precondition = a.pre.iter().map(|n| lookup(n).expect("reachable precondition")).collect();
        let outcomes = a
            .outcomes
            .iter()
            .map(|(prob, add, del)| {
                Outcome::new(
                    *prob,
                    add.iter().map(|n| lookup(n).expect("reachable add")).collect(),
                    del.iter().filter_map(lookup).collect(),
                )
            })
            .collect();
        actions.push(ProbAction { id: ActionId(0), name: a.name.clone(), precondition, outcomes });
    }
    let init = init_ids.iter().map(|f| remap[f.index()].expect("init is reachable")).collect();
    let goal = goal_ids.iter().map(|f| remap[f.index()].expect("goal is kept")).collect();
    Ok(Problem::new(p.name.clone(), final_names, actions, init, goal)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppddl::parse_pair;

    fn ground_text(text: &str) -> Problem {
        let (d, p) = parse_pair(text).unwrap();
        ground(&d, &p).unwrap()
    }

    #[test]
    fn nested_probabilistic_multiplies_out() {
        let p = ground_text(
            "(define (domain n) (:requirements :probabilistic-effects) (:predicates (a) (b) (s))
               (:action x :parameters () :precondition (s)
                 :effect (probabilistic 0.5 (and (a) (probabilistic 0.5 (b))) 0.5 (b))))
             (define (problem q) (:domain n) (:init (s)) (:goal (and (a) (b))))",
        );
        let a = &p.actions[0];
        // {a} 0.25, {a,b} 0.25, {b} 0.5 after merging.
        assert_eq!(a.outcomes.len(), 3);
        let total: f64 = a.outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let ab = a.outcomes.iter().find(|o| o.add.len() == 2).unwrap();
        assert_eq!(ab.probability, 0.25);
    }

    #[test]
    fn independent_coins_give_four_outcomes() {
        let p = ground_text(
            "(define (domain n) (:predicates (a) (b) (s))
               (:action x :parameters () :precondition (s)
                 :effect (and (probabilistic 0.5 (a)) (probabilistic 0.5 (b)))))
             (define (problem q) (:domain n) (:init (s)) (:goal (and (a) (b))))",
        );
        let probs: Vec<f64> = p.actions[0].outcomes.iter().map(|o| o.probability).collect();
        assert_eq!(probs, vec![0.25; 4]);
    }

    #[test]
    fn zero_objects_give_zero_instances() {
        let p = ground_text(
            "(define (domain n) (:types thing) (:predicates (s) (t ?x - thing))
               (:action use :parameters (?x - thing) :precondition (s) :effect (t ?x))
               (:action noop :parameters () :precondition (s) :effect (s)))
             (define (problem q) (:domain n) (:init (s)) (:goal (s)))",
        );
        assert_eq!(p.actions.len(), 1);
        assert_eq!(p.actions[0].name, "noop");
    }

    #[test]
    fn unreachable_actions_are_dropped_and_statics_compiled() {
        let p = ground_text(
            "(define (domain n) (:types loc) (:predicates (at ?l - loc) (link ?a ?b - loc))
               (:action go :parameters (?a ?b - loc) :precondition (and (at ?a) (link ?a ?b))
                 :effect (and (at ?b) (not (at ?a)))))
             (define (problem q) (:domain n) (:objects x y z w - loc)
               (:init (at x) (link x y) (link y z) (link w x)) (:goal (at z)))",
        );
        let names: Vec<&str> = p.actions.iter().map(|a| a.name.as_str()).collect();
        // go(w,x) needs at(w), which is never reachable.
        assert_eq!(names, vec!["go(x,y)", "go(y,z)"]);
        assert!(p.fact_id("link(x,y)").is_none());
        assert!(p.fact_id("at(w)").is_none());
        assert_eq!(p.n_facts(), 3);
    }

    #[test]
    fn add_wins_over_delete() {
        let p = ground_text(
            "(define (domain n) (:predicates (a))
               (:action x :parameters () :precondition (and) :effect (and (not (a)) (a))))
             (define (problem q) (:domain n) (:init) (:goal (a)))",
        );
        assert!(p.actions[0].outcomes[0].del.is_empty());
    }

    #[test]
    fn residual_mass_becomes_noop() {
        let p = ground_text(
            "(define (domain n) (:predicates (a))
               (:action x :parameters () :precondition (and) :effect (probabilistic 0.3 (a))))
             (define (problem q) (:domain n) (:init) (:goal (a)))",
        );
        let o = &p.actions[0].outcomes;
        assert_eq!(o.len(), 2);
        assert!((o[1].probability - 0.7).abs() < 1e-12);
        assert!(o[1].add.is_empty());
    }
}
