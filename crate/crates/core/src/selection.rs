//! Choosing which types get a parameter update at each step.
//!
//! Three policies: update every type, sample one type from the current
//! posterior, or treat types as bandit arms rewarded by how far their
//! estimate moved (UCB1).

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::TypeBelief;
use crate::model::ParameterVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("parameter vectors have different bounds")]
    BoundsMismatch,
    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),
    #[error("arm {index} out of range ({arms} arms)")]
    UnknownArm { index: usize, arms: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SelectionPolicy {
    #[default]
    All,
    Posterior,
    Ucb1,
}

impl std::str::FromStr for SelectionPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Self::All),
            "posterior" => Ok(Self::Posterior),
            "ucb1" => Ok(Self::Ucb1),
            other => Err(format!("unknown selection policy '{other}'")),
        }
    }
}

pub fn select_all(type_count: usize) -> BTreeSet<usize> {
    (0..type_count).collect()
}

/// Draws one type index with probability equal to its posterior mass.
pub fn select_posterior<R: Rng + ?Sized>(belief: &TypeBelief, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &p) in belief.probs().iter().enumerate() {
        if p > 0.0 {
            last_positive = k;
        }
        acc += p;
        if u < acc && p > 0.0 {
            return k;
        }
    }
    last_positive
}

/// Normalised L1 distance between two estimates in the same box.
pub fn bandit_reward(
    p_new: &ParameterVector,
    p_old: &ParameterVector,
) -> Result<f64, SelectionError> {
    if p_new.bounds() != p_old.bounds() {
        return Err(SelectionError::BoundsMismatch);
    }
    let eta: f64 = p_new.bounds().iter().map(|b| b.width()).sum();
    let moved: f64 = p_new
        .values()
        .iter()
        .zip(p_old.values())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((moved / eta).clamp(0.0, 1.0))
}

/// Pull counts and running mean rewards per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditStats {
    counts: Vec<u64>,
    means: Vec<f64>,
    total: u64,
}

impl BanditStats {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: vec![0; arms],
            means: vec![0.0; arms],
            total: 0,
        }
    }

    /// Builds stats directly; `total` is the sum of `counts`.
    pub fn from_parts(counts: Vec<u64>, means: Vec<f64>) -> Self {
        assert_eq!(counts.len(), means.len());
        let total = counts.iter().sum();
        Self {
            counts,
            means,
            total,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    /// UCB1: first unpulled arm, otherwise the arm maximising
    /// `mean + sqrt(2 ln n / n_k)`. Ties go to the lowest index.
    pub fn select_ucb1(&self) -> Option<usize> {
        if let Some(k) = self.counts.iter().position(|&c| c == 0) {
            return Some(k);
        }
        let ln_total = (self.total as f64).ln();
        let mut best: Option<(usize, f64)> = None;
        for (k, (&c, &m)) in self.counts.iter().zip(&self.means).enumerate() {
            let score = m + (2.0 * ln_total / c as f64).sqrt();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((k, score));
            }
        }
        best.map(|(k, _)| k)
    }

    pub fn record_reward(&mut self, index: usize, reward: f64) -> Result<(), SelectionError> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(SelectionError::RewardOutOfRange(reward));
        }
        let arms = self.counts.len();
        let count = self
            .counts
            .get_mut(index)
            .ok_or(SelectionError::UnknownArm { index, arms })?;
        *count += 1;
        self.total += 1;
        let n = *count as f64;
        self.means[index] += (reward - self.means[index]) / n;
        Ok(())
    }
}
