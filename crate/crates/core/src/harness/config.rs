use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::estimation::{EstimatorKind, DEFAULT_BUDGET};
use crate::foraging::{LeaderView, WorldConfig};
use crate::planner::PlannerConfig;
use crate::selection::SelectionPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WorldPreset {
    #[default]
    #[serde(rename = "10x10")]
    Small,
    #[serde(rename = "15x15")]
    Large,
}

impl WorldPreset {
    pub fn config(self) -> WorldConfig {
        match self {
            Self::Small => WorldConfig::SMALL,
            Self::Large => WorldConfig::LARGE,
        }
    }
}

impl FromStr for WorldPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "10x10" | "small" => Ok(Self::Small),
            "15x15" | "large" => Ok(Self::Large),
            other => Err(format!("unknown world preset '{other}' (expected 10x10 or 15x15)")),
        }
    }
}

/// Where the parameter estimates start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitialEstimates {
    /// The instance's random draws for every type.
    #[default]
    Random,
    /// The true parameters for the true type, random draws for the rest.
    Correct,
}

impl FromStr for InitialEstimates {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "correct" => Ok(Self::Correct),
            other => Err(format!("unknown initial estimates '{other}'")),
        }
    }
}

/// The two fixed-parameter reference configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Rnd,
    Cor,
}

impl FromStr for Baseline {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rnd" => Ok(Self::Rnd),
            "cor" => Ok(Self::Cor),
            other => Err(format!("unknown baseline '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub world: WorldPreset,
    pub estimator: EstimatorKind,
    pub selection: SelectionPolicy,
    pub initial: InitialEstimates,
    pub ego_budget: usize,
    /// Defaults to 300 on 10x10 and 500 on 15x15.
    pub rollouts: Option<usize>,
    pub horizon: usize,
    pub discount: f64,
    pub exploration: f64,
    pub instances: usize,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    pub leader_view: LeaderView,
    /// Worker threads for the batch; `None` uses all cores.
    pub threads: Option<usize>,
    /// With `false`, update times are recorded as zero so that outputs are
    /// reproducible byte for byte.
    pub measure_time: bool,
    /// Write one replayable trace per episode under `<output>/traces`.
    pub traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let planner = PlannerConfig::default();
        Self {
            world: WorldPreset::Small,
            estimator: EstimatorKind::None,
            selection: SelectionPolicy::All,
            initial: InitialEstimates::Random,
            ego_budget: DEFAULT_BUDGET,
            rollouts: None,
            horizon: planner.horizon,
            discount: planner.discount,
            exploration: planner.exploration,
            instances: 50,
            base_seed: 0,
            output: None,
            leader_view: LeaderView::default(),
            threads: None,
            measure_time: true,
            traces: false,
        }
    }
}

impl ExperimentConfig {
    pub fn world_config(&self) -> WorldConfig {
        self.world.config()
    }

    pub fn planner(&self) -> PlannerConfig {
        let preset = PlannerConfig::for_world(&self.world_config());
        PlannerConfig {
            rollouts: self.rollouts.unwrap_or(preset.rollouts),
            horizon: self.horizon,
            discount: self.discount,
            exploration: self.exploration,
        }
    }

    /// Fixed-parameter configuration for `kind` with everything else kept.
    pub fn baseline(&self, kind: Baseline) -> Self {
        Self {
            estimator: EstimatorKind::None,
            initial: match kind {
                Baseline::Rnd => InitialEstimates::Random,
                Baseline::Cor => InitialEstimates::Correct,
            },
            ..self.clone()
        }
    }

    /// Short name such as `ABU`, `EGO-10`, `Rnd` or `Cor`.
    pub fn label(&self) -> String {
        match (self.estimator, self.initial) {
            (EstimatorKind::None, InitialEstimates::Random) => "Rnd".into(),
            (EstimatorKind::None, InitialEstimates::Correct) => "Cor".into(),
            (EstimatorKind::Aga, _) => "AGA".into(),
            (EstimatorKind::Abu, _) => "ABU".into(),
            (EstimatorKind::Ego, _) => format!("EGO-{}", self.ego_budget),
        }
    }
}
