//! A PPDDL subset: typed STRIPS with `probabilistic` effects.
//!
//! [`parse`] reads domains and problems into lifted ASTs, [`ground`]
//! instantiates them into a [`crate::model::Problem`]. The [`generators`]
//! module builds the triangle tireworld family programmatically and
//! [`json`] offers a grounded interchange format that skips the parser.

pub mod ast;
pub mod generators;
mod ground;
pub mod json;
mod parser;
mod sexpr;

use std::fmt;

pub use ast::{Definition, Domain as LiftedDomain, Problem as LiftedProblem};
pub use ground::{ground, GroundError, MAX_GROUND_ACTIONS};
pub use parser::check_problem;

/// Location of a syntax element in the source text.
///
/// Spans never take part in AST equality, so a re-parsed pretty-print
/// compares equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl PartialEq for SourceSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    UnboundVariable,
    TypeMismatch,
    ProbabilitySum,
    UnknownSymbol,
    Unsupported,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{}:{}: {}", span.line, span.column, message)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: SourceSpan,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic { kind, span, message: message.into() }
    }

    pub fn lexical(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic::new(DiagnosticKind::Lexical, span, message)
    }

    /// `file:line:col: message`.
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {}", self.span.line, self.span.column, self.message)
    }
}

/// Parses every `(define ...)` form in `text`.
pub fn parse(text: &str) -> Result<Vec<Definition>, Diagnostic> {
    parser::parse(text)
}

/// Parses text that must hold exactly one domain.
pub fn parse_domain(text: &str) -> Result<LiftedDomain, Diagnostic> {
    let mut defs = parse(text)?;
    match (defs.len(), defs.pop()) {
        (1, Some(Definition::Domain(d))) => Ok(d),
        _ => Err(Diagnostic::new(
            DiagnosticKind::Syntax,
            SourceSpan { line: 1, column: 1, ..Default::default() },
            "expected exactly one domain definition",
        )),
    }
}

/// Parses text that must hold exactly one problem.
pub fn parse_problem(text: &str) -> Result<LiftedProblem, Diagnostic> {
    let mut defs = parse(text)?;
    match (defs.len(), defs.pop()) {
        (1, Some(Definition::Problem(p))) => Ok(p),
        _ => Err(Diagnostic::new(
            DiagnosticKind::Syntax,
            SourceSpan { line: 1, column: 1, ..Default::default() },
            "expected exactly one problem definition",
        )),
    }
}

/// Splits a text holding one domain and one problem (in any order).
pub fn parse_pair(text: &str) -> Result<(LiftedDomain, LiftedProblem), Diagnostic> {
    let defs = parse(text)?;
    let mut domain = None;
    let mut problem = None;
    for d in defs {
        match d {
            Definition::Domain(d) if domain.is_none() => domain = Some(d),
            Definition::Problem(p) if problem.is_none() => problem = Some(p),
            other => {
                let span = match &other {
                    Definition::Domain(d) => d.span,
                    Definition::Problem(p) => p.span,
                };
                return Err(Diagnostic::new(DiagnosticKind::Syntax, span, "duplicate definition"));
            }
        }
    }
    let here = SourceSpan { line: 1, column: 1, ..Default::default() };
    match (domain, problem) {
        (Some(d), Some(p)) => Ok((d, p)),
        (None, _) => Err(Diagnostic::new(DiagnosticKind::Syntax, here, "no domain definition")),
        (_, None) => Err(Diagnostic::new(DiagnosticKind::Syntax, here, "no problem definition")),
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticKind::Lexical => "lexical error",
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::UnboundVariable => "unbound variable",
            DiagnosticKind::TypeMismatch => "type mismatch",
            DiagnosticKind::ProbabilitySum => "probability error",
            DiagnosticKind::UnknownSymbol => "unknown symbol",
            DiagnosticKind::Unsupported => "unsupported construct",
        };
        f.write_str(s)
    }
}
