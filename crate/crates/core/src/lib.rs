//! Bayesian reasoning over hypothetical agent types with selective estimation
//! of bounded continuous parameters inside those types, plus a level-based
//! foraging testbed with a UCT planner and an experiment harness.

pub mod belief;
pub mod estimation;
pub mod foraging;
pub mod harness;
pub mod model;
pub mod planner;
pub mod selection;
