use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foraging::{decode_actions, Instance, WorldError};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("reading or writing trace: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed trace: {0}")]
    Json(#[from] serde_json::Error),
    #[error("step {step}: {source}")]
    World { step: usize, source: WorldError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Joint action ids, controlled agent first.
    pub actions: Vec<usize>,
    /// Seed of the move-order draw for this transition.
    pub move_seed: u64,
    /// Seed the planner ran with before choosing its action.
    pub plan_seed: u64,
    pub reward: u32,
}

/// Everything needed to rebuild an episode's world trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub instance: Instance,
    pub label: String,
    pub steps: Vec<TraceStep>,
    pub completed: bool,
    pub final_digest: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub steps: usize,
    pub collected: usize,
    pub completed: bool,
    /// Rewards and the final world match the recording.
    pub consistent: bool,
}

impl Trace {
    pub fn save(&self, path: &Path) -> Result<(), TraceError> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TraceError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Re-applies the recorded joint actions with the recorded move orders.
    pub fn replay(&self) -> Result<ReplayReport, TraceError> {
        let mut world = self.instance.world.clone();
        let mut consistent = true;
        for (step, s) in self.steps.iter().enumerate() {
            let actions = decode_actions(&s.actions).map_err(|source| TraceError::World { step, source })?;
            let reward = world
                .apply(&actions, &mut ChaCha8Rng::seed_from_u64(s.move_seed))
                .map_err(|source| TraceError::World { step, source })?;
            consistent &= reward == s.reward;
        }
        consistent &= world.digest() == self.final_digest && world.all_collected() == self.completed;
        Ok(ReplayReport {
            steps: world.step,
            collected: world.collected_items(),
            completed: world.all_collected(),
            consistent,
        })
    }
}
