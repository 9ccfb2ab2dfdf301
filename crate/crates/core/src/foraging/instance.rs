//! Random problem instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::types::{ForagingKind, FORAGING_BOUNDS};
use super::{Agent, ForagingState, Heading, Item, Pos, WorldError};
use crate::model::ParameterVector;

pub const MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub width: i32,
    pub height: i32,
    /// Including the controlled agent.
    pub agents: usize,
    pub items: usize,
    pub max_steps: usize,
}

impl WorldConfig {
    pub const SMALL: WorldConfig = WorldConfig {
        width: 10,
        height: 10,
        agents: 2,
        items: 5,
        max_steps: 100,
    };
    pub const LARGE: WorldConfig = WorldConfig {
        width: 15,
        height: 15,
        agents: 3,
        items: 10,
        max_steps: 150,
    };
}

/// A generated episode start, with the hidden truth about the other agents
/// and the random initial estimates every configuration starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub seed: u64,
    pub config: WorldConfig,
    pub world: ForagingState,
    /// Indexed by other agent (agent `j` is at `j - 1`).
    pub true_kinds: Vec<ForagingKind>,
    pub true_params: Vec<ParameterVector>,
    /// `[other agent][type index]`.
    pub initial_estimates: Vec<Vec<ParameterVector>>,
}

impl Instance {
    pub fn other_agents(&self) -> usize {
        self.true_kinds.len()
    }
}

/// Checks the placement and level constraints of a generated world.
pub fn satisfies_constraints(w: &ForagingState) -> bool {
    let mut cells: Vec<Pos> = w.agents.iter().map(|a| a.pos).collect();
    cells.extend(w.items.iter().filter(|i| !i.collected).map(|i| i.pos));
    let mut dedup = cells.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != cells.len() || cells.iter().any(|&p| !w.in_grid(p)) {
        return false;
    }
    let on_border = |p: Pos| p.x == 0 || p.y == 0 || p.x == w.width - 1 || p.y == w.height - 1;
    if w.items.iter().any(|i| on_border(i.pos)) {
        return false;
    }
    for (a, ia) in w.items.iter().enumerate() {
        for ib in &w.items[a + 1..] {
            if ia.pos.euclidean(ib.pos) <= 1.0 {
                return false;
            }
        }
    }
    let max_item = w.items.iter().map(|i| i.level).fold(f64::NEG_INFINITY, f64::max);
    let agent_sum: f64 = w.agents.iter().map(|a| a.level).sum();
    w.agents.iter().all(|a| a.level < max_item) && w.items.iter().all(|i| i.level <= agent_sum)
}

fn sample_world<R: Rng + ?Sized>(cfg: &WorldConfig, rng: &mut R) -> ForagingState {
    let mut cells: Vec<Pos> = (0..cfg.height)
        .flat_map(|y| (0..cfg.width).map(move |x| Pos::new(x, y)))
        .collect();
    cells.shuffle(rng);
    let interior: Vec<Pos> = cells
        .iter()
        .copied()
        .filter(|p| p.x > 0 && p.y > 0 && p.x < cfg.width - 1 && p.y < cfg.height - 1)
        .collect();
    let items: Vec<Item> = interior
        .iter()
        .take(cfg.items)
        .map(|&pos| Item {
            pos,
            level: rng.gen(),
            collected: false,
        })
        .collect();
    let agents = cells
        .iter()
        .filter(|p| !items.iter().any(|i| i.pos == **p))
        .take(cfg.agents)
        .map(|&pos| Agent {
            pos,
            level: rng.gen(),
            heading: Heading::ALL[rng.gen_range(0..4)],
        })
        .collect();
    ForagingState {
        width: cfg.width,
        height: cfg.height,
        agents,
        items,
        step: 0,
    }
}

/// Rejection-samples a world meeting [`satisfies_constraints`], then draws the
/// other agents' true behaviours and the initial estimates.
pub fn generate_instance(cfg: &WorldConfig, seed: u64) -> Result<Instance, WorldError> {
    let interior = ((cfg.width - 2).max(0) * (cfg.height - 2).max(0)) as usize;
    if cfg.items > interior || cfg.agents + cfg.items > (cfg.width * cfg.height) as usize || cfg.agents == 0 {
        return Err(WorldError::GridTooSmall {
            entities: cfg.agents + cfg.items,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let world = (0..MAX_ATTEMPTS)
        .map(|_| sample_world(cfg, &mut rng))
        .find(satisfies_constraints)
        .ok_or(WorldError::GenerationFailed(MAX_ATTEMPTS))?;
    let others = cfg.agents - 1;
    let bounds = FORAGING_BOUNDS.to_vec();
    let true_kinds: Vec<ForagingKind> = (0..others)
        .map(|_| ForagingKind::ALL[rng.gen_range(0..4)])
        .collect();
    let true_params = (0..others)
        .map(|j| {
            let level = world.agents[j + 1].level;
            let p2 = rng.gen_range(bounds[1].min..=bounds[1].max);
            let p3 = rng.gen_range(bounds[2].min..=bounds[2].max);
            ParameterVector::new(vec![level, p2, p3], bounds.clone()).expect("drawn inside bounds")
        })
        .collect();
    let initial_estimates = (0..others)
        .map(|_| {
            ForagingKind::ALL
                .iter()
                .map(|_| ParameterVector::uniform(bounds.clone(), &mut rng))
                .collect()
        })
        .collect();
    Ok(Instance {
        seed,
        config: *cfg,
        world,
        true_kinds,
        true_params,
        initial_estimates,
    })
}
