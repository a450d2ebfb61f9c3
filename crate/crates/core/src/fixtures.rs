//! Shipped problem fixtures, embedded at compile time.

use crate::model::Problem;
use crate::ppddl::{ground, parse_pair, GroundError};

/// `(name, text)` for every fixture; each text holds a domain and a problem.
pub const ALL: &[(&str, &str)] = &[
    ("detour", include_str!("../fixtures/detour.ppddl")),
    ("order_choice", include_str!("../fixtures/order_choice.ppddl")),
    ("order_coin", include_str!("../fixtures/order_coin.ppddl")),
    ("softlock", include_str!("../fixtures/softlock.ppddl")),
    ("deadlock", include_str!("../fixtures/deadlock.ppddl")),
    ("tireworld_small", include_str!("../fixtures/tireworld_small.ppddl")),
    ("triangle_p1", include_str!("../fixtures/triangle_p1.ppddl")),
    ("triangle_p2", include_str!("../fixtures/triangle_p2.ppddl")),
    ("triangle_p3", include_str!("../fixtures/triangle_p3.ppddl")),
    ("blocksworld_small", include_str!("../fixtures/blocksworld_small.ppddl")),
];

pub fn text(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses and grounds fixture `name`. Panics on an unknown name or a
/// broken fixture.
pub fn problem(name: &str) -> Problem {
    try_problem(name).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn try_problem(name: &str) -> Result<Problem, GroundError> {
    let t = text(name).unwrap_or_else(|| panic!("no fixture named {name}"));
    let (d, p) = parse_pair(t)?;
    ground(&d, &p)
}
