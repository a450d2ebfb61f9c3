//! Landmark-assisted Monte Carlo planning for goal-directed MDPs.
//!
//! The pipeline: parse and ground a PPDDL task ([`ppddl`]), determinize it
//! ([`determinize`]), extract landmarks ([`landmarks`]), then plan with the
//! landmark-guided UCT planner ([`planner`]). [`oracles`] holds brute-force
//! references for testing and [`harness`] runs experiment grids.

pub mod determinize;
pub mod fixtures;
pub mod harness;
pub mod landmarks;
pub mod model;
pub mod oracles;
pub mod planner;
pub mod ppddl;
