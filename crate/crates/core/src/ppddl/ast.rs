//! Lifted PPDDL syntax trees and their pretty-printer.

use std::fmt;

use super::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    And(Vec<Effect>),
    Add(Atom),
    Del(Atom),
    Probabilistic(Vec<(f64, Effect)>),
}

impl Effect {
    pub fn count_probabilistic(&self) -> usize {
        match self {
            Effect::And(es) => es.iter().map(Effect::count_probabilistic).sum(),
            Effect::Add(_) | Effect::Del(_) => 0,
            Effect::Probabilistic(bs) => 1 + bs.iter().map(|(_, e)| e.count_probabilistic()).sum::<usize>(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Atom>,
    pub effect: Effect,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(name, parent)`; parent defaults to `object`.
    pub types: Vec<TypedName>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
    pub span: SourceSpan,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn parent_type(&self, ty: &str) -> Option<&str> {
        self.types.iter().find(|t| t.name == ty).map(|t| t.ty.as_str())
    }

    /// `sub` equals `sup` or inherits from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = sub;
        for _ in 0..=self.types.len() {
            if cur == sup || sup == "object" {
                return true;
            }
            match self.parent_type(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == "object" || self.types.iter().any(|t| t.name == ty)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<Atom>,
    pub goal: Vec<Atom>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Definition {
    Domain(Domain),
    Problem(Problem),
}

// --- printing ---------------------------------------------------------------

fn typed_list(f: &mut fmt::Formatter<'_>, items: &[TypedName]) -> fmt::Result {
    // Group consecutive items of the same type: `a b - t c - u`.
    let mut i = 0;
    let mut first = true;
    while i < items.len() {
        let ty = &items[i].ty;
        let mut j = i;
        while j < items.len() && items[j].ty == *ty {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(&items[j].name)?;
            j += 1;
        }
        write!(f, " - {ty}")?;
        i = j;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {}", a.name())?;
        }
        f.write_str(")")
    }
}

fn conjunction(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    match atoms {
        [] => f.write_str("(and)"),
        [a] => write!(f, "{a}"),
        _ => {
            f.write_str("(and")?;
            for a in atoms {
                write!(f, " {a}")?;
            }
            f.write_str(")")
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::And(es) => {
                f.write_str("(and")?;
                for e in es {
                    write!(f, " {e}")?;
                }
                f.write_str(")")
            }
            Effect::Add(a) => write!(f, "{a}"),
            Effect::Del(a) => write!(f, "(not {a})"),
            Effect::Probabilistic(bs) => {
                f.write_str("(probabilistic")?;
                for (p, e) in bs {
                    write!(f, " {p} {e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            writeln!(f, "  (:requirements {})", self.requirements.join(" "))?;
        }
        if !self.types.is_empty() {
            f.write_str("  (:types ")?;
            typed_list(f, &self.types)?;
            writeln!(f, ")")?;
        }
        if !self.constants.is_empty() {
            f.write_str("  (:constants ")?;
            typed_list(f, &self.constants)?;
            writeln!(f, ")")?;
        }
        f.write_str("  (:predicates")?;
        for p in &self.predicates {
            write!(f, " ({}", p.name)?;
            if !p.params.is_empty() {
                f.write_str(" ")?;
                typed_list(f, &p.params)?;
            }
            f.write_str(")")?;
        }
        writeln!(f, ")")?;
        for a in &self.actions {
            writeln!(f, "  (:action {}", a.name)?;
            f.write_str("    :parameters (")?;
            typed_list(f, &a.params)?;
            writeln!(f, ")")?;
            f.write_str("    :precondition ")?;
            conjunction(f, &a.precondition)?;
            writeln!(f)?;
            writeln!(f, "    :effect {})", a.effect)?;
        }
        writeln!(f, ")")
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain)?;
        if !self.objects.is_empty() {
            f.write_str("  (:objects ")?;
            typed_list(f, &self.objects)?;
            writeln!(f, ")")?;
        }
        f.write_str("  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        writeln!(f, ")")?;
        f.write_str("  (:goal ")?;
        conjunction(f, &self.goal)?;
        writeln!(f, "))")
    }
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Definition::Domain(d) => d.fmt(f),
            Definition::Problem(p) => p.fmt(f),
        }
    }
}
