//! Turning a `--problem` argument into a grounded problem.

use std::path::Path;

use thiserror::Error;

use crate::fixtures;
use crate::model::Problem;
use crate::ppddl::generators::{chain, triangle_tireworld};
use crate::ppddl::json::{from_json, JsonError};
use crate::ppddl::{ground, parse_domain, parse_pair, parse_problem, GroundError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Ground { path: String, source: GroundError },
    #[error("{path}: {source}")]
    Json { path: String, source: JsonError },
    #[error("bad problem spec `{0}`")]
    Spec(String),
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })
}

fn numbers(spec: &str, rest: &str, n: usize) -> Result<Vec<u32>, LoadError> {
    let v: Vec<u32> = rest
        .split(':')
        .map(|x| x.parse().map_err(|_| LoadError::Spec(spec.into())))
        .collect::<Result<_, _>>()?;
    if v.len() != n || v.contains(&0) {
        return Err(LoadError::Spec(spec.into()));
    }
    Ok(v)
}

/// Accepted forms:
///
/// * `triangle-tireworld:N` and `chain:B:D` for the generators;
/// * `fixture:NAME` for an embedded fixture;
/// * a `.json` path in the grounded interchange format;
/// * any other path as PPDDL text, holding both definitions or, with
///   `domain`, only the problem.
pub fn load_problem(spec: &str, domain: Option<&Path>) -> Result<Problem, LoadError> {
    if let Some(rest) = spec.strip_prefix("triangle-tireworld:") {
        return Ok(triangle_tireworld(numbers(spec, rest, 1)?[0]));
    }
    if let Some(rest) = spec.strip_prefix("chain:") {
        let v = numbers(spec, rest, 2)?;
        return Ok(chain(v[0], v[1]));
    }
    if let Some(name) = spec.strip_prefix("fixture:") {
        if fixtures::text(name).is_none() {
            return Err(LoadError::Spec(spec.into()));
        }
        return fixtures::try_problem(name).map_err(|source| LoadError::Ground { path: spec.into(), source });
    }
    let path = Path::new(spec);
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        return from_json(&text).map_err(|source| LoadError::Json { path: spec.into(), source });
    }
    let (d, p) = match domain {
        Some(dpath) => {
            let dfile = dpath.display().to_string();
            let d = parse_domain(&read(dpath)?).map_err(|e| LoadError::Parse(e.render(&dfile)))?;
            let p = parse_problem(&text).map_err(|e| LoadError::Parse(e.render(spec)))?;
            (d, p)
        }
        None => parse_pair(&text).map_err(|e| LoadError::Parse(e.render(spec)))?,
    };
    ground(&d, &p).map_err(|source| LoadError::Ground { path: spec.into(), source })
}
