//! Level-based foraging: agents move on a grid and jointly load items whose
//! level does not exceed the summed levels of the adjacent loading agents.
//!
//! Coordinates: `x` grows east, `y` grows north. Cell `(x, y)` spans
//! `[x, x+1) × [y, y+1)`.

pub mod astar;
pub mod instance;
pub mod types;
pub mod vision;

use std::hash::{DefaultHasher, Hash, Hasher};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use astar::{astar_path, first_move};
pub use instance::{generate_instance, Instance, WorldConfig};
pub use types::{choose_target, ForagingKind, ForagingType, LeaderView, FORAGING_BOUNDS};
pub use vision::{view_certainty, visible_agents_and_items, Visible};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("expected {expected} actions, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("unknown action id {0}")]
    UnknownAction(usize),
    #[error("no valid instance after {0} attempts")]
    GenerationFailed(usize),
    #[error("grid too small for {entities} entities")]
    GridTooSmall { entities: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dir: Heading) -> Self {
        let (dx, dy) = dir.delta();
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn manhattan(self, other: Self) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn euclidean(self, other: Self) -> f64 {
        (((self.x - other.x).pow(2) + (self.y - other.y).pow(2)) as f64).sqrt()
    }

    pub fn is_adjacent(self, other: Self) -> bool {
        self.manhattan(other) == 1
    }

    /// Row-major ordering key used to break ties deterministically.
    pub fn row_col(self) -> (i32, i32) {
        (self.y, self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heading {
    N,
    E,
    S,
    W,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::N, Heading::E, Heading::S, Heading::W];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Heading::N => (0, 1),
            Heading::E => (1, 0),
            Heading::S => (0, -1),
            Heading::W => (-1, 0),
        }
    }

    pub fn unit_vector(self) -> (f64, f64) {
        let (dx, dy) = self.delta();
        (dx as f64, dy as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    N,
    E,
    S,
    W,
    Load,
}

impl Action {
    pub const COUNT: usize = 5;
    pub const ALL: [Action; 5] = [Action::N, Action::E, Action::S, Action::W, Action::Load];
    pub const MOVES: [Action; 4] = [Action::N, Action::E, Action::S, Action::W];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self, WorldError> {
        Self::ALL.get(i).copied().ok_or(WorldError::UnknownAction(i))
    }

    pub fn direction(self) -> Option<Heading> {
        match self {
            Action::N => Some(Heading::N),
            Action::E => Some(Heading::E),
            Action::S => Some(Heading::S),
            Action::W => Some(Heading::W),
            Action::Load => None,
        }
    }

    pub fn from_heading(h: Heading) -> Self {
        match h {
            Heading::N => Action::N,
            Heading::E => Action::E,
            Heading::S => Action::S,
            Heading::W => Action::W,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub pos: Pos,
    pub level: f64,
    pub heading: Heading,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub pos: Pos,
    pub level: f64,
    pub collected: bool,
}

/// Full world snapshot. Agent 0 is the controlled agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForagingState {
    pub width: i32,
    pub height: i32,
    pub agents: Vec<Agent>,
    pub items: Vec<Item>,
    pub step: usize,
}

impl ForagingState {
    pub fn in_grid(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height
    }

    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt()
    }

    pub fn agent_at(&self, p: Pos) -> Option<usize> {
        self.agents.iter().position(|a| a.pos == p)
    }

    pub fn item_at(&self, p: Pos) -> Option<usize> {
        self.items.iter().position(|i| !i.collected && i.pos == p)
    }

    pub fn is_free(&self, p: Pos) -> bool {
        self.in_grid(p) && self.agent_at(p).is_none() && self.item_at(p).is_none()
    }

    pub fn remaining_items(&self) -> usize {
        self.items.iter().filter(|i| !i.collected).count()
    }

    pub fn collected_items(&self) -> usize {
        self.items.len() - self.remaining_items()
    }

    pub fn all_collected(&self) -> bool {
        self.items.iter().all(|i| i.collected)
    }

    /// Hash of everything that changes during an episode.
    pub fn digest(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for a in &self.agents {
            a.pos.hash(&mut h);
            a.heading.hash(&mut h);
        }
        for i in &self.items {
            i.collected.hash(&mut h);
        }
        h.finish()
    }

    /// Applies one joint action in place: loads resolve first, then moves run
    /// in the order given. Returns the number of items collected.
    pub fn apply_with_order(&mut self, actions: &[Action], order: &[usize]) -> Result<u32, WorldError> {
        if actions.len() != self.agents.len() {
            return Err(WorldError::ActionCount {
                expected: self.agents.len(),
                got: actions.len(),
            });
        }
        let mut reward = 0;
        for item in self.items.iter_mut().filter(|i| !i.collected) {
            let pooled: f64 = self
                .agents
                .iter()
                .zip(actions)
                .filter(|(a, &act)| act == Action::Load && a.pos.is_adjacent(item.pos))
                .map(|(a, _)| a.level)
                .sum();
            if pooled > 0.0 && pooled >= item.level {
                item.collected = true;
                reward += 1;
            }
        }
        for &i in order {
            let Some(dir) = actions[i].direction() else {
                continue;
            };
            let target = self.agents[i].pos.offset(dir);
            if self.is_free(target) {
                self.agents[i].pos = target;
                self.agents[i].heading = dir;
            }
        }
        self.step += 1;
        Ok(reward)
    }

    pub fn apply<R: Rng + ?Sized>(&mut self, actions: &[Action], rng: &mut R) -> Result<u32, WorldError> {
        let order = move_order(self.agents.len(), rng);
        self.apply_with_order(actions, &order)
    }

    /// Successor state and team reward.
    pub fn step_world<R: Rng + ?Sized>(
        &self,
        actions: &[Action],
        rng: &mut R,
    ) -> Result<(ForagingState, f64), WorldError> {
        let mut next = self.clone();
        let r = next.apply(actions, rng)?;
        Ok((next, r as f64))
    }
}

/// Random execution order of the agents' moves.
pub fn move_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Decodes a list of action ids.
pub fn decode_actions(ids: &[usize]) -> Result<Vec<Action>, WorldError> {
    ids.iter().map(|&i| Action::from_index(i)).collect()
}
