use super::ast::*;
use super::sexpr::{read_all, Sexpr};
use super::{Diagnostic, DiagnosticKind, SourceSpan};
use crate::model::PROBABILITY_TOLERANCE;

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing", ":probabilistic-effects"];

type PResult<T> = Result<T, Diagnostic>;

fn syntax(span: SourceSpan, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(DiagnosticKind::Syntax, span, msg)
}

fn expect_list<'a>(e: &'a Sexpr, what: &str) -> PResult<&'a [Sexpr]> {
    e.as_list().ok_or_else(|| syntax(e.span(), format!("expected {what}")))
}

fn expect_symbol<'a>(e: &'a Sexpr, what: &str) -> PResult<&'a str> {
    e.as_symbol().ok_or_else(|| syntax(e.span(), format!("expected {what}")))
}

/// Parses every `(define ...)` form in `text`, validating domains on the
/// spot. Problems are checked against their domain by [`check_problem`].
pub fn parse(text: &str) -> PResult<Vec<Definition>> {
    read_all(text)?.iter().map(parse_definition).collect()
}

fn parse_definition(e: &Sexpr) -> PResult<Definition> {
    let items = expect_list(e, "`(define ...)`")?;
    match items.first().and_then(Sexpr::as_symbol) {
        Some("define") => {}
        _ => return Err(syntax(e.span(), "expected `(define ...)`")),
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(e.span(), "missing `(domain NAME)` or `(problem NAME)`"))?;
    let header = expect_list(header, "`(domain NAME)` or `(problem NAME)`")?;
    let (kind, name) = match header {
        [k, n] => (expect_symbol(k, "`domain` or `problem`")?, expect_symbol(n, "a name")?),
        _ => return Err(syntax(items[1].span(), "expected `(domain NAME)` or `(problem NAME)`")),
    };
    match kind {
        "domain" => {
            let d = parse_domain_body(name, &items[2..], e.span())?;
            validate_domain(&d)?;
            Ok(Definition::Domain(d))
        }
        "problem" => Ok(Definition::Problem(parse_problem_body(name, &items[2..], e.span())?)),
        other => Err(syntax(header[0].span(), format!("unknown definition kind `{other}`"))),
    }
}

fn parse_typed_list(items: &[Sexpr], allow_vars: bool) -> PResult<Vec<TypedName>> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = expect_symbol(&items[i], "a name")?;
        if s == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax(items[i].span(), "missing type after `-`"))?;
            let ty = expect_symbol(ty, "a type name")?;
            if ty == "either" {
                return Err(Diagnostic::new(
                    DiagnosticKind::Unsupported,
                    items[i + 1].span(),
                    "`either` types are not supported",
                ));
            }
            if pending.is_empty() {
                return Err(syntax(items[i].span(), "`-` without preceding names"));
            }
            out.extend(pending.drain(..).map(|name| TypedName { name, ty: ty.to_string() }));
            i += 2;
            continue;
        }
        if s.starts_with('?') != allow_vars {
            let msg = if allow_vars { "expected a `?variable`" } else { "unexpected `?variable`" };
            return Err(syntax(items[i].span(), msg));
        }
        pending.push(s.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|name| TypedName { name, ty: "object".into() }));
    Ok(out)
}

fn parse_atom(e: &Sexpr) -> PResult<Atom> {
    let items = expect_list(e, "an atom `(pred args...)`")?;
    let (head, args) = items
        .split_first()
        .ok_or_else(|| syntax(e.span(), "empty atom"))?;
    let predicate = expect_symbol(head, "a predicate name")?;
    if matches!(predicate, "and" | "or" | "not" | "probabilistic" | "when" | "forall" | "exists" | "imply" | "=") {
        return Err(Diagnostic::new(
            DiagnosticKind::Unsupported,
            head.span(),
            format!("`{predicate}` is not allowed here"),
        ));
    }
    let args = args
        .iter()
        .map(|a| {
            let s = expect_symbol(a, "a term")?;
            Ok(if s.starts_with('?') { Term::Var(s.into()) } else { Term::Const(s.into()) })
        })
        .collect::<PResult<Vec<_>>>()?;
    Ok(Atom { predicate: predicate.into(), args, span: e.span() })
}

fn parse_conjunction(e: &Sexpr) -> PResult<Vec<Atom>> {
    let items = expect_list(e, "a condition")?;
    match items.first().and_then(Sexpr::as_symbol) {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => items[1..].iter().map(parse_conjunction).collect::<PResult<Vec<_>>>().map(|v| v.concat()),
        Some("not") => Err(Diagnostic::new(
            DiagnosticKind::Unsupported,
            e.span(),
            "negative conditions are not supported",
        )),
        Some(op @ ("or" | "imply" | "forall" | "exists" | "when")) => Err(Diagnostic::new(
            DiagnosticKind::Unsupported,
            e.span(),
            format!("`{op}` conditions are not supported"),
        )),
        _ => Ok(vec![parse_atom(e)?]),
    }
}

fn parse_weight(e: &Sexpr) -> PResult<f64> {
    let s = expect_symbol(e, "a probability")?;
    let value = match s.split_once('/') {
        Some((n, d)) => match (n.parse::<f64>(), d.parse::<f64>()) {
            (Ok(n), Ok(d)) if d != 0.0 => Some(n / d),
            _ => None,
        },
        None => s.parse::<f64>().ok(),
    };
    match value {
        Some(v) if (0.0..=1.0).contains(&v) => Ok(v),
        Some(v) => Err(Diagnostic::new(
            DiagnosticKind::ProbabilitySum,
            e.span(),
            format!("probability {v} outside [0, 1]"),
        )),
        None => Err(syntax(e.span(), format!("`{s}` is not a probability"))),
    }
}

fn parse_effect(e: &Sexpr) -> PResult<Effect> {
    let items = expect_list(e, "an effect")?;
    match items.first().and_then(Sexpr::as_symbol) {
        None if items.is_empty() => Ok(Effect::And(Vec::new())),
        Some("and") => Ok(Effect::And(items[1..].iter().map(parse_effect).collect::<PResult<_>>()?)),
        Some("not") => match &items[1..] {
            [inner] => Ok(Effect::Del(parse_atom(inner)?)),
            _ => Err(syntax(e.span(), "`not` takes exactly one atom")),
        },
        Some("probabilistic") => {
            let rest = &items[1..];
            if rest.is_empty() || rest.len() % 2 != 0 {
                return Err(syntax(e.span(), "`probabilistic` expects weight/effect pairs"));
            }
            let mut branches = Vec::new();
            let mut sum = 0.0;
            for pair in rest.chunks(2) {
                let w = parse_weight(&pair[0])?;
                sum += w;
                branches.push((w, parse_effect(&pair[1])?));
            }
            if sum > 1.0 + PROBABILITY_TOLERANCE {
                return Err(Diagnostic::new(
                    DiagnosticKind::ProbabilitySum,
                    e.span(),
                    format!("probabilities sum to {sum}, exceeding 1"),
                ));
            }
            Ok(Effect::Probabilistic(branches))
        }
        Some(op @ ("when" | "forall" | "increase" | "decrease" | "assign")) => Err(Diagnostic::new(
            DiagnosticKind::Unsupported,
            e.span(),
            format!("`{op}` effects are not supported"),
        )),
        _ => Ok(Effect::Add(parse_atom(e)?)),
    }
}

fn section(e: &Sexpr) -> PResult<(&str, &[Sexpr])> {
    let items = expect_list(e, "a `(:section ...)`")?;
    let head = items
        .first()
        .ok_or_else(|| syntax(e.span(), "empty section"))?;
    Ok((expect_symbol(head, "a section keyword")?, &items[1..]))
}

fn parse_domain_body(name: &str, sections: &[Sexpr], span: SourceSpan) -> PResult<Domain> {
    let mut d = Domain {
        name: name.into(),
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
        span,
    };
    for sec in sections {
        let (key, body) = section(sec)?;
        match key {
            ":requirements" => {
                for r in body {
                    let r = expect_symbol(r, "a requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(Diagnostic::new(
                            DiagnosticKind::Unsupported,
                            sec.span(),
                            format!("unsupported requirement `{r}`"),
                        ));
                    }
                    d.requirements.push(r.into());
                }
            }
            ":types" => d.types = parse_typed_list(body, false)?,
            ":constants" => d.constants = parse_typed_list(body, false)?,
            ":predicates" => {
                for p in body {
                    let items = expect_list(p, "a predicate declaration")?;
                    let (head, params) = items
                        .split_first()
                        .ok_or_else(|| syntax(p.span(), "empty predicate declaration"))?;
                    d.predicates.push(PredicateDecl {
                        name: expect_symbol(head, "a predicate name")?.into(),
                        params: parse_typed_list(params, true)?,
                    });
                }
            }
            ":action" => d.actions.push(parse_action(body, sec.span())?),
            other => {
                return Err(Diagnostic::new(
                    DiagnosticKind::Unsupported,
                    sec.span(),
                    format!("unsupported domain section `{other}`"),
                ))
            }
        }
    }
    Ok(d)
}

fn parse_action(body: &[Sexpr], span: SourceSpan) -> PResult<ActionSchema> {
    let (name, rest) = body
        .split_first()
        .ok_or_else(|| syntax(span, "action without a name"))?;
    let mut a = ActionSchema {
        name: expect_symbol(name, "an action name")?.into(),
        params: Vec::new(),
        precondition: Vec::new(),
        effect: Effect::And(Vec::new()),
        span,
    };
    if rest.len() % 2 != 0 {
        return Err(syntax(span, "action body expects `:keyword value` pairs"));
    }
    for pair in rest.chunks(2) {
        match expect_symbol(&pair[0], "an action keyword")? {
            ":parameters" => a.params = parse_typed_list(expect_list(&pair[1], "a parameter list")?, true)?,
            ":precondition" => a.precondition = parse_conjunction(&pair[1])?,
            ":effect" => a.effect = parse_effect(&pair[1])?,
            other => {
                return Err(Diagnostic::new(
                    DiagnosticKind::Unsupported,
                    pair[0].span(),
                    format!("unsupported action keyword `{other}`"),
                ))
            }
        }
    }
    Ok(a)
}

fn parse_problem_body(name: &str, sections: &[Sexpr], span: SourceSpan) -> PResult<Problem> {
    let mut p = Problem {
        name: name.into(),
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
        span,
    };
    for sec in sections {
        let (key, body) = section(sec)?;
        match key {
            ":domain" => match body {
                [n] => p.domain = expect_symbol(n, "a domain name")?.into(),
                _ => return Err(syntax(sec.span(), "expected `(:domain NAME)`")),
            },
            ":objects" => p.objects = parse_typed_list(body, false)?,
            ":init" => p.init = body.iter().map(parse_atom).collect::<PResult<_>>()?,
            ":goal" => match body {
                [g] => p.goal = parse_conjunction(g)?,
                _ => return Err(syntax(sec.span(), "expected `(:goal CONDITION)`")),
            },
            other => {
                return Err(Diagnostic::new(
                    DiagnosticKind::Unsupported,
                    sec.span(),
                    format!("unsupported problem section `{other}`"),
                ))
            }
        }
    }
    if p.domain.is_empty() {
        return Err(syntax(span, "problem lacks `(:domain NAME)`"));
    }
    Ok(p)
}

// --- validation ---------------------------------------------------------------

fn check_atom_arity<'d>(d: &'d Domain, atom: &Atom) -> PResult<&'d PredicateDecl> {
    let decl = d.predicate(&atom.predicate).ok_or_else(|| {
        Diagnostic::new(
            DiagnosticKind::UnknownSymbol,
            atom.span,
            format!("undeclared predicate `{}`", atom.predicate),
        )
    })?;
    if decl.params.len() != atom.args.len() {
        return Err(Diagnostic::new(
            DiagnosticKind::TypeMismatch,
            atom.span,
            format!(
                "`{}` expects {} arguments, got {}",
                atom.predicate,
                decl.params.len(),
                atom.args.len()
            ),
        ));
    }
    Ok(decl)
}

fn check_arg_type(d: &Domain, atom: &Atom, name: &str, actual: &str, expected: &str) -> PResult<()> {
    if d.is_subtype(actual, expected) {
        Ok(())
    } else {
        Err(Diagnostic::new(
            DiagnosticKind::TypeMismatch,
            atom.span,
            format!("`{name}` has type `{actual}` but `{}` expects `{expected}`", atom.predicate),
        ))
    }
}

fn check_schema_atom(d: &Domain, a: &ActionSchema, atom: &Atom) -> PResult<()> {
    let decl = check_atom_arity(d, atom)?;
    for (term, param) in atom.args.iter().zip(&decl.params) {
        let actual = match term {
            Term::Var(v) => a
                .params
                .iter()
                .find(|p| p.name == *v)
                .map(|p| p.ty.as_str())
                .ok_or_else(|| {
                    Diagnostic::new(
                        DiagnosticKind::UnboundVariable,
                        atom.span,
                        format!("variable `{v}` is not a parameter of `{}`", a.name),
                    )
                })?,
            Term::Const(c) => d
                .constants
                .iter()
                .find(|k| k.name == *c)
                .map(|k| k.ty.as_str())
                .ok_or_else(|| {
                    Diagnostic::new(
                        DiagnosticKind::UnknownSymbol,
                        atom.span,
                        format!("undeclared constant `{c}`"),
                    )
                })?,
        };
        check_arg_type(d, atom, term.name(), actual, &param.ty)?;
    }
    Ok(())
}

fn effect_atoms<'e>(e: &'e Effect, out: &mut Vec<&'e Atom>) {
    match e {
        Effect::And(es) => es.iter().for_each(|e| effect_atoms(e, out)),
        Effect::Add(a) | Effect::Del(a) => out.push(a),
        Effect::Probabilistic(bs) => bs.iter().for_each(|(_, e)| effect_atoms(e, out)),
    }
}

fn validate_domain(d: &Domain) -> PResult<()> {
    let check_ty = |ty: &str, span: SourceSpan| {
        if d.has_type(ty) {
            Ok(())
        } else {
            Err(Diagnostic::new(DiagnosticKind::UnknownSymbol, span, format!("undeclared type `{ty}`")))
        }
    };
    for t in &d.types {
        check_ty(&t.ty, d.span)?;
    }
    for c in &d.constants {
        check_ty(&c.ty, d.span)?;
    }
    for p in &d.predicates {
        for param in &p.params {
            check_ty(&param.ty, d.span)?;
        }
    }
    for a in &d.actions {
        for param in &a.params {
            check_ty(&param.ty, a.span)?;
        }
        for atom in &a.precondition {
            check_schema_atom(d, a, atom)?;
        }
        let mut atoms = Vec::new();
        effect_atoms(&a.effect, &mut atoms);
        for atom in atoms {
            check_schema_atom(d, a, atom)?;
        }
    }
    Ok(())
}

/// Checks a problem's objects, init and goal against `d`.
pub fn check_problem(d: &Domain, p: &Problem) -> PResult<()> {
    if p.domain != d.name {
        return Err(Diagnostic::new(
            DiagnosticKind::UnknownSymbol,
            p.span,
            format!("problem is for domain `{}`, not `{}`", p.domain, d.name),
        ));
    }
    for o in &p.objects {
        if !d.has_type(&o.ty) {
            return Err(Diagnostic::new(
                DiagnosticKind::UnknownSymbol,
                p.span,
                format!("object `{}` has undeclared type `{}`", o.name, o.ty),
            ));
        }
    }
    let object_type = |name: &str| {
        p.objects
            .iter()
            .chain(&d.constants)
            .find(|o| o.name == name)
            .map(|o| o.ty.as_str())
    };
    for atom in p.init.iter().chain(&p.goal) {
        let decl = check_atom_arity(d, atom)?;
        for (term, param) in atom.args.iter().zip(&decl.params) {
            let name = match term {
                Term::Var(v) => {
                    return Err(Diagnostic::new(
                        DiagnosticKind::UnboundVariable,
                        atom.span,
                        format!("variable `{v}` in a ground literal"),
                    ))
                }
                Term::Const(c) => c,
            };
            let ty = object_type(name).ok_or_else(|| {
                Diagnostic::new(DiagnosticKind::UnknownSymbol, atom.span, format!("undeclared object `{name}`"))
            })?;
            check_arg_type(d, atom, name, ty, &param.ty)?;
        }
    }
    Ok(())
}
