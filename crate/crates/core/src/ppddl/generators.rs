//! Programmatic benchmark families.
//!
//! Each generator emits PPDDL text (domain followed by problem), so the
//! generated instances go through the same parser and grounder as files.

use std::fmt::Write;

use super::{ground, parse_pair, GroundError, LiftedDomain, LiftedProblem};
use crate::model::Problem;

/// Lattice coordinates `(i, j)` of the triangle network of size `n`,
/// listed in node-number order: node `k` (1-based) is entry `k - 1`.
///
/// Points satisfy `i + j <= 2n`; numbering sorts by `(i + 2j, i)`, which
/// sweeps the triangle from the start corner `(0, 0)` to the goal corner
/// `(0, 2n)`.
pub fn triangle_nodes(n: u32) -> Vec<(u32, u32)> {
    let m = 2 * n;
    let mut nodes: Vec<(u32, u32)> = (0..=m)
        .flat_map(|j| (0..=m - j).map(move |i| (i, j)))
        .collect();
    nodes.sort_by_key(|&(i, j)| (i + 2 * j, i));
    nodes
}

/// One-way roads as 1-based node pairs. Every unit cell anchored at
/// `(2p, 2q)` contributes its outer sides and the inner triangle.
pub fn triangle_roads(n: u32) -> Vec<(usize, usize)> {
    let nodes = triangle_nodes(n);
    let number = |c: (u32, u32)| nodes.iter().position(|&x| x == c).expect("lattice point") + 1;
    let mut roads = Vec::new();
    for q in 0..n {
        for p in 0..n - q {
            let (a, b) = (2 * p, 2 * q);
            let cell = [
                ((a, b), (a + 1, b)),
                ((a + 1, b), (a + 2, b)),
                ((a, b), (a, b + 1)),
                ((a, b + 1), (a, b + 2)),
                ((a + 2, b), (a + 1, b + 1)),
                ((a + 1, b + 1), (a, b + 2)),
                ((a + 1, b), (a, b + 1)),
                ((a, b + 1), (a + 1, b + 1)),
            ];
            roads.extend(cell.iter().map(|&(from, to)| (number(from), number(to))));
        }
    }
    roads.sort_unstable();
    roads
}

/// 1-based nodes holding a spare tire: all points off the start edge
/// (`i > 0`) except those at even `i` and odd `j`, which are the centres
/// of the downward inner triangles.
pub fn triangle_spares(n: u32) -> Vec<usize> {
    triangle_nodes(n)
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| i > 0 && (i % 2 == 1 || j % 2 == 0))
        .map(|(k, _)| k + 1)
        .collect()
}

pub const TRIANGLE_TIREWORLD_DOMAIN: &str = "\
(define (domain triangle-tireworld)
  (:requirements :typing :strips :probabilistic-effects)
  (:types location)
  (:predicates (car-at ?loc - location) (spare-in ?loc - location)
               (road ?from - location ?to - location) (not-flattire) (flattire))
  (:action move-car
    :parameters (?from - location ?to - location)
    :precondition (and (car-at ?from) (road ?from ?to) (not-flattire))
    :effect (and (car-at ?to) (not (car-at ?from))
                 (probabilistic 0.5 (and (flattire) (not (not-flattire))))))
  (:action change-tire
    :parameters (?loc - location)
    :precondition (and (car-at ?loc) (spare-in ?loc) (flattire))
    :effect (and (not (spare-in ?loc)) (not (flattire)) (not-flattire))))
";

/// Problem text for the size-`n` triangle; locations are named `n1`, `n2`, ...
pub fn triangle_tireworld_problem_text(n: u32) -> String {
    assert!(n >= 1, "triangle size must be positive");
    let count = triangle_nodes(n).len();
    let mut s = String::new();
    writeln!(s, "(define (problem triangle-tire-{n})").unwrap();
    writeln!(s, "  (:domain triangle-tireworld)").unwrap();
    let objs: Vec<String> = (1..=count).map(|k| format!("n{k}")).collect();
    writeln!(s, "  (:objects {} - location)", objs.join(" ")).unwrap();
    write!(s, "  (:init (car-at n1) (not-flattire)").unwrap();
    for (a, b) in triangle_roads(n) {
        write!(s, "\n         (road n{a} n{b})").unwrap();
    }
    for k in triangle_spares(n) {
        write!(s, "\n         (spare-in n{k})").unwrap();
    }
    writeln!(s, ")").unwrap();
    writeln!(s, "  (:goal (car-at n{count})))").unwrap();
    s
}

pub fn triangle_tireworld_text(n: u32) -> String {
    format!("{TRIANGLE_TIREWORLD_DOMAIN}\n{}", triangle_tireworld_problem_text(n))
}

pub fn generate_triangle_tireworld(n: u32) -> (LiftedDomain, LiftedProblem) {
    parse_pair(&triangle_tireworld_text(n)).expect("generated text is well-formed")
}

/// Grounded triangle tireworld of size `n`.
pub fn triangle_tireworld(n: u32) -> Problem {
    let (d, p) = generate_triangle_tireworld(n);
    ground(&d, &p).expect("generated instance grounds")
}

pub const CHAIN_DOMAIN: &str = "\
(define (domain choice-chain)
  (:requirements :typing :strips)
  (:types level choice)
  (:predicates (depth ?l - level) (succ ?l - level ?m - level) (chosen ?l - level ?c - choice))
  (:action step
    :parameters (?l - level ?m - level ?c - choice)
    :precondition (and (depth ?l) (succ ?l ?m))
    :effect (and (depth ?m) (not (depth ?l)) (chosen ?l ?c))))
";

/// A deterministic chain of `depth` decisions with `branching` choices each.
/// The goal is choice `c0` at every level plus the final depth, so exactly
/// one leaf of the `branching^depth` tree is a goal.
pub fn chain_text(branching: u32, depth: u32) -> String {
    let mut s = String::from(CHAIN_DOMAIN);
    writeln!(s, "\n(define (problem chain-b{branching}-d{depth})").unwrap();
    writeln!(s, "  (:domain choice-chain)").unwrap();
    let levels: Vec<String> = (0..=depth).map(|i| format!("l{i}")).collect();
    let choices: Vec<String> = (0..branching).map(|j| format!("c{j}")).collect();
    writeln!(s, "  (:objects {} - level {} - choice)", levels.join(" "), choices.join(" ")).unwrap();
    write!(s, "  (:init (depth l0)").unwrap();
    for i in 0..depth {
        write!(s, " (succ l{i} l{})", i + 1).unwrap();
    }
    writeln!(s, ")").unwrap();
    write!(s, "  (:goal (and (depth l{depth})").unwrap();
    for i in 0..depth {
        write!(s, " (chosen l{i} c0)").unwrap();
    }
    writeln!(s, ")))").unwrap();
    s
}

pub fn chain(branching: u32, depth: u32) -> Problem {
    let (d, p) = parse_pair(&chain_text(branching, depth)).expect("generated text is well-formed");
    ground(&d, &p).expect("generated instance grounds")
}

pub const BLOCKSWORLD_DOMAIN: &str = "\
(define (domain prob-blocksworld)
  (:requirements :typing :strips :probabilistic-effects)
  (:types block)
  (:predicates (holding ?b - block) (emptyhand) (on-table ?b - block)
               (on ?b1 - block ?b2 - block) (clear ?b - block))
  (:action pick-up
    :parameters (?b1 - block ?b2 - block)
    :precondition (and (emptyhand) (clear ?b1) (on ?b1 ?b2))
    :effect (probabilistic
              3/4 (and (holding ?b1) (clear ?b2) (not (emptyhand)) (not (clear ?b1)) (not (on ?b1 ?b2)))
              1/4 (and (clear ?b2) (on-table ?b1) (not (on ?b1 ?b2)))))
  (:action pick-up-from-table
    :parameters (?b - block)
    :precondition (and (emptyhand) (clear ?b) (on-table ?b))
    :effect (probabilistic 3/4 (and (holding ?b) (not (emptyhand)) (not (on-table ?b)) (not (clear ?b)))))
  (:action put-on-block
    :parameters (?b1 - block ?b2 - block)
    :precondition (and (holding ?b1) (clear ?b2))
    :effect (probabilistic
              3/4 (and (on ?b1 ?b2) (emptyhand) (clear ?b1) (not (holding ?b1)) (not (clear ?b2)))
              1/4 (and (on-table ?b1) (emptyhand) (clear ?b1) (not (holding ?b1)))))
  (:action put-down
    :parameters (?b - block)
    :precondition (holding ?b)
    :effect (and (on-table ?b) (emptyhand) (clear ?b) (not (holding ?b)))))
";

/// Blocksworld problem text. Towers are listed bottom to top.
pub fn blocksworld_problem_text(name: &str, init: &[&[&str]], goal: &[&[&str]]) -> String {
    let mut blocks: Vec<&str> = init.iter().flat_map(|t| t.iter().copied()).collect();
    blocks.sort_unstable();
    let mut s = String::new();
    writeln!(s, "(define (problem {name})").unwrap();
    writeln!(s, "  (:domain prob-blocksworld)").unwrap();
    writeln!(s, "  (:objects {} - block)", blocks.join(" ")).unwrap();
    write!(s, "  (:init (emptyhand)").unwrap();
    for tower in init {
        for (k, b) in tower.iter().enumerate() {
            if k == 0 {
                write!(s, " (on-table {b})").unwrap();
            } else {
                write!(s, " (on {b} {})", tower[k - 1]).unwrap();
            }
        }
        if let Some(top) = tower.last() {
            write!(s, " (clear {top})").unwrap();
        }
    }
    writeln!(s, ")").unwrap();
    write!(s, "  (:goal (and").unwrap();
    for tower in goal {
        for k in 1..tower.len() {
            write!(s, " (on {} {})", tower[k], tower[k - 1]).unwrap();
        }
    }
    writeln!(s, ")))").unwrap();
    s
}

pub fn blocksworld(name: &str, init: &[&[&str]], goal: &[&[&str]]) -> Result<Problem, GroundError> {
    let text = format!("{BLOCKSWORLD_DOMAIN}\n{}", blocksworld_problem_text(name, init, goal));
    let (d, p) = parse_pair(&text)?;
    ground(&d, &p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_matches_the_reference_drawing() {
        assert_eq!(triangle_nodes(2).len(), 15);
        assert_eq!(triangle_spares(2), vec![2, 4, 5, 6, 9, 10, 11, 13, 14]);
        let roads = triangle_roads(2);
        assert_eq!(roads.len(), 24);
        // The outer route 1-2-4-6-9 and on to 15 along the hypotenuse.
        for e in [(1, 2), (2, 4), (4, 6), (6, 9), (9, 11), (11, 13), (13, 14), (14, 15)] {
            assert!(roads.contains(&e), "missing road {e:?}");
        }
        assert!(roads.contains(&(1, 3)) && roads.contains(&(3, 7)) && roads.contains(&(12, 15)));
    }

    #[test]
    fn sizes_grow_triangularly() {
        assert_eq!(triangle_nodes(1).len(), 6);
        assert_eq!(triangle_spares(1), vec![2, 4, 5]);
        assert_eq!(triangle_roads(1).len(), 8);
        assert_eq!(triangle_nodes(3).len(), 28);
        assert_eq!(triangle_roads(3).len(), 48);
    }

    #[test]
    fn p2_grounds_with_expected_outcome_counts() {
        let p = triangle_tireworld(2);
        let moves: Vec<_> = p.actions.iter().filter(|a| a.name.starts_with("move-car")).collect();
        let changes: Vec<_> = p.actions.iter().filter(|a| a.name.starts_with("change-tire")).collect();
        assert_eq!(moves.len(), 24);
        assert!(moves.iter().all(|a| a.outcomes.len() == 2));
        assert_eq!(changes.len(), 9);
        assert!(changes.iter().all(|a| a.outcomes.len() == 1));
        assert!(p.is_goal(&p.state_of(&["car-at(n15)", "flattire"])));
    }

    #[test]
    fn p2_initial_applicable_actions() {
        let p = triangle_tireworld(2);
        let names: Vec<&str> = p.applicable(&p.init).iter().map(|&a| p.action(a).name.as_str()).collect();
        // Node 1 has roads to nodes 2 and 3; no spare at node 1, tire intact.
        assert_eq!(names.len(), 2);
        assert!(names.contains(&"move-car(n1,n2)") && names.contains(&"move-car(n1,n3)"));
    }

    #[test]
    fn chain_has_one_goal_leaf() {
        let p = chain(3, 2);
        assert_eq!(p.actions.len(), 6);
        assert_eq!(p.goal.facts().len(), 3);
    }

    #[test]
    fn blocksworld_grounds() {
        let p = blocksworld("bw", &[&["a", "b"], &["c"]], &[&["c", "b", "a"]]).unwrap();
        assert_eq!(p.goal.facts().len(), 2);
        let pick = p.actions.iter().find(|a| a.name == "pick-up-from-table(c)").unwrap();
        // 3/4 success plus the residual no-op branch.
        assert_eq!(pick.outcomes.len(), 2);
    }
}
