//! Posterior over a finite type space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{action_probabilities, AgentType, ModelError, Observation, ParameterVector};

/// Floor applied to likelihoods before they enter the posterior.
pub const LIKELIHOOD_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("belief has {belief} entries but {likelihoods} likelihoods were given")]
    DimensionMismatch { belief: usize, likelihoods: usize },
    #[error("invalid likelihood {0}")]
    InvalidLikelihood(f64),
    #[error("invalid belief: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeBelief {
    probs: Vec<f64>,
}

impl TypeBelief {
    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn new(probs: Vec<f64>) -> Result<Self, BeliefError> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(BeliefError::Invalid(format!("{probs:?}")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Bayes rule: `posterior[k] ∝ max(likelihoods[k], floor) * prior[k]`.
    pub fn update(&self, likelihoods: &[f64]) -> Result<Self, BeliefError> {
        if likelihoods.len() != self.probs.len() {
            return Err(BeliefError::DimensionMismatch {
                belief: self.probs.len(),
                likelihoods: likelihoods.len(),
            });
        }
        if let Some(&bad) = likelihoods.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(BeliefError::InvalidLikelihood(bad));
        }
        let mut post: Vec<f64> = self
            .probs
            .iter()
            .zip(likelihoods)
            .map(|(p, l)| p * l.max(LIKELIHOOD_FLOOR))
            .collect();
        let sum: f64 = post.iter().sum();
        // The prior sums to one and every factor is at least the floor.
        debug_assert!(sum > 0.0);
        for p in &mut post {
            *p /= sum;
        }
        Ok(Self { probs: post })
    }
}

/// Probability the type assigns to `observed_action` after the last
/// observation of `history`.
pub fn likelihood_of_observed<T: AgentType>(
    ty: &T,
    history: &[Observation<T::World>],
    params: &ParameterVector,
    observed_action: usize,
) -> Result<f64, ModelError> {
    action_probabilities(ty, history, params)?.prob(observed_action)
}
