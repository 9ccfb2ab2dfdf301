//! Episodes, baselines and batch experiments on the foraging world.

mod batch;
mod config;
mod episode;
mod trace;

use thiserror::Error;

use crate::foraging::WorldError;

pub use batch::{
    generate_instances, instance_seed, run_batch, run_on_instances, summarise, write_outputs,
    BatchResult, Summary,
};
pub use config::{Baseline, ExperimentConfig, InitialEstimates, WorldPreset};
pub use episode::{run_baseline, run_episode, EpisodeRecord, StepRecord};
pub use trace::{ReplayReport, Trace, TraceError, TraceStep};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Trace(#[from] TraceError),
}
