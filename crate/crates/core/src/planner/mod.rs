//! Landmark-guided UCT.
//!
//! [`lamp`] is the execution loop; [`LampCore`] holds the learned tables
//! and implements rollouts. [`landmark_plan`] is the generic skeleton with
//! pluggable selectors, and [`sequential_plan`] executes a fixed landmark
//! sequence with a classical sub-planner.

mod core;
mod sequential;
mod skeleton;
mod tables;

use thiserror::Error;

use crate::model::{ActionId, History, State};

pub use self::core::{lamp, select_action, LampCore, RolloutResult, RolloutStats};
pub use sequential::{sequential_plan, BfsPlanner, Policy, SequentialOutcome, SequentialStatus, SubPlanner};
pub use skeleton::{
    landmark_plan, ActionSelector, LampActionSelector, LampLandmarkSelector, LandmarkSelector, RandomActionSelector,
    RandomLandmarkSelector,
};
pub use tables::{argmax_random, gubs_utility, ucb1, ucb_update, Arms, QTables};

#[derive(Debug, Clone, PartialEq)]
pub struct LampConfig {
    pub n_rollouts: u32,
    pub budget: u32,
    pub depth: u32,
    /// Weight of the landmark table against the goal table.
    pub alpha: f64,
    pub exploration_c: f64,
    pub k_g: f64,
    /// `u(c) = exp(-c / utility_decay)`.
    pub utility_decay: f64,
    pub seed: u64,
}

impl Default for LampConfig {
    fn default() -> Self {
        LampConfig {
            n_rollouts: 100,
            budget: 200,
            depth: 20,
            alpha: 0.0,
            exploration_c: std::f64::consts::SQRT_2,
            k_g: 1.0,
            utility_decay: 10.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("alpha must lie in [0, 1], got {0}")]
    Alpha(f64),
    #[error("{0} must be at least 1")]
    NonPositive(&'static str),
    #[error("exploration constant must be non-negative, got {0}")]
    Exploration(f64),
    #[error("utility decay must be positive, got {0}")]
    Decay(f64),
    #[error("goal utility must be finite, got {0}")]
    GoalUtility(f64),
}

impl LampConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ConfigError::Alpha(self.alpha));
        }
        for (name, v) in [("n_rollouts", self.n_rollouts), ("budget", self.budget), ("depth", self.depth)] {
            if v == 0 {
                return Err(ConfigError::NonPositive(name));
            }
        }
        if !(self.exploration_c >= 0.0 && self.exploration_c.is_finite()) {
            return Err(ConfigError::Exploration(self.exploration_c));
        }
        if !(self.utility_decay > 0.0 && self.utility_decay.is_finite()) {
            return Err(ConfigError::Decay(self.utility_decay));
        }
        if !self.k_g.is_finite() {
            return Err(ConfigError::GoalUtility(self.k_g));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecutionStatus {
    Success,
    DeadEnd,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionOutcome {
    pub status: ExecutionStatus,
    /// Executed actions and visited states.
    pub history: History,
    /// The loop counter, which also counts landmark-selection iterations.
    pub cost: u32,
}

impl ExecutionOutcome {
    pub fn is_success(&self) -> bool {
        self.status == ExecutionStatus::Success
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.history.actions
    }

    /// Number of executed actions (all actions have unit cost).
    pub fn executed_cost(&self) -> u32 {
        self.history.actions.len() as u32
    }

    pub fn final_state(&self) -> &State {
        self.history.last()
    }
}
