//! The four parameterised foraging behaviours.
//!
//! All share one template: keep the remembered destination until it is
//! reached, otherwise pick a new target from what the view cone shows; then
//! load if next to the destination item, walk the A* path towards it, or
//! wander uniformly when there is no destination. Every action finally gets
//! 0.01 extra mass before normalisation.
//!
//! Parameters: `p1` skill level in `[0, 1]`, `p2` view radius as a fraction
//! of the grid diagonal in `[0.1, 1]`, `p3` view angle as a fraction of a
//! full turn in `[0.1, 1]`. The remembered destination depends on all three,
//! so none of them is Markovian.

use serde::{Deserialize, Serialize};

use super::astar::first_move;
use super::vision::{visible_agents_and_items, visible_from, Visible};
use super::{Action, ForagingState, Pos};
use crate::model::{ActionDistribution, AgentType, Bounds, ParameterVector};

pub const FORAGING_BOUNDS: [Bounds; 3] = [
    Bounds { min: 0.0, max: 1.0 },
    Bounds { min: 0.1, max: 1.0 },
    Bounds { min: 0.1, max: 1.0 },
];

const NON_MARKOVIAN: [bool; 3] = [false; 3];

/// Mass added to every action before normalising.
pub const ACTION_MIXING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForagingKind {
    /// Furthest visible item.
    L1,
    /// Highest-level visible item below own level, else highest-level item.
    L2,
    /// Follows the furthest visible agent, predicting it as `L1`.
    F1,
    /// Follows the strongest visible agent above own level (else furthest),
    /// predicting it as `L2`.
    F2,
}

impl ForagingKind {
    pub const ALL: [ForagingKind; 4] = [
        ForagingKind::L1,
        ForagingKind::L2,
        ForagingKind::F1,
        ForagingKind::F2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ForagingKind::L1 => "L1",
            ForagingKind::L2 => "L2",
            ForagingKind::F1 => "F1",
            ForagingKind::F2 => "F2",
        }
    }
}

/// Whose cone a follower uses when predicting its leader's choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LeaderView {
    /// The follower's own radius and angle, placed at the leader's cell and
    /// heading.
    #[default]
    FollowerParams,
    /// The leader sees the whole grid.
    FullGrid,
}

/// Visible entity furthest from `from`; ties go to the lowest (row, col).
fn furthest(from: Pos, cells: impl Iterator<Item = (usize, Pos)>) -> Option<usize> {
    let mut best: Option<(usize, Pos, f64)> = None;
    for (i, p) in cells {
        let d = from.euclidean(p);
        let better = match best {
            None => true,
            Some((_, bp, bd)) => d > bd || (d == bd && p.row_col() < bp.row_col()),
        };
        if better {
            best = Some((i, p, d));
        }
    }
    best.map(|(i, _, _)| i)
}

/// Entity with the highest level among `cands`; ties go to the lowest
/// (row, col).
fn highest_level(cands: impl Iterator<Item = (usize, Pos, f64)>) -> Option<usize> {
    let mut best: Option<(usize, Pos, f64)> = None;
    for (i, p, l) in cands {
        let better = match best {
            None => true,
            Some((_, bp, bl)) => l > bl || (l == bl && p.row_col() < bp.row_col()),
        };
        if better {
            best = Some((i, p, l));
        }
    }
    best.map(|(i, _, _)| i)
}

fn leader_choice(state: &ForagingState, from: Pos, own_level: f64, items: &[usize], skill_aware: bool) -> Option<Pos> {
    let pick = if skill_aware {
        let below = highest_level(
            items
                .iter()
                .map(|&i| (i, state.items[i].pos, state.items[i].level))
                .filter(|c| c.2 < own_level),
        );
        below.or_else(|| {
            highest_level(
                items
                    .iter()
                    .map(|&i| (i, state.items[i].pos, state.items[i].level)),
            )
        })
    } else {
        furthest(from, items.iter().map(|&i| (i, state.items[i].pos)))
    };
    pick.map(|i| state.items[i].pos)
}

/// Target choice of each behaviour given what agent `me` sees.
///
/// `p1` is used as own level; visible entities are judged by their true
/// levels and positions. A follower predicts its leader from the leader's
/// cell and heading, with the cone given by `leader_view`.
pub fn choose_target(
    kind: ForagingKind,
    state: &ForagingState,
    me: usize,
    visible: &Visible,
    params: &ParameterVector,
    leader_view: LeaderView,
) -> Option<Pos> {
    let loc = state.agents[me].pos;
    let own_level = params.get(0);
    match kind {
        ForagingKind::L1 => leader_choice(state, loc, own_level, &visible.items, false),
        ForagingKind::L2 => leader_choice(state, loc, own_level, &visible.items, true),
        ForagingKind::F1 | ForagingKind::F2 => {
            if visible.agents.is_empty() {
                return None;
            }
            let agent_cells = || visible.agents.iter().map(|&a| (a, state.agents[a].pos));
            let leader = match kind {
                ForagingKind::F1 => furthest(loc, agent_cells()),
                _ => highest_level(
                    visible
                        .agents
                        .iter()
                        .map(|&a| (a, state.agents[a].pos, state.agents[a].level))
                        .filter(|c| c.2 > own_level),
                )
                .or_else(|| furthest(loc, agent_cells())),
            }
            .expect("visible agents nonempty");
            let leader_pos = state.agents[leader].pos;
            if visible.items.is_empty() {
                return Some(leader_pos);
            }
            let (r, a) = match leader_view {
                LeaderView::FollowerParams => (params.get(1), params.get(2)),
                LeaderView::FullGrid => (1.0, 1.0),
            };
            let seen = visible_from(state, leader_pos, state.agents[leader].heading, r, a);
            leader_choice(
                state,
                leader_pos,
                state.agents[leader].level,
                &seen.items,
                kind == ForagingKind::F2,
            )
        }
    }
}

/// One foraging behaviour bound to the agent it models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForagingType {
    pub kind: ForagingKind,
    pub agent: usize,
    pub leader_view: LeaderView,
    /// Remembered destination.
    pub memory: Option<Pos>,
}

impl ForagingType {
    pub fn new(kind: ForagingKind, agent: usize) -> Self {
        Self {
            kind,
            agent,
            leader_view: LeaderView::default(),
            memory: None,
        }
    }

    pub fn with_leader_view(mut self, view: LeaderView) -> Self {
        self.leader_view = view;
        self
    }

    /// Action distribution for the agent in `world`, before mixing, together
    /// with the destination it settled on.
    fn decide(&self, world: &ForagingState, params: &ParameterVector) -> (Vec<f64>, Option<Pos>) {
        let loc = world.agents[self.agent].pos;
        let dest = match self.memory {
            Some(m) if m != loc => Some(m),
            _ => {
                let visible = visible_agents_and_items(world, self.agent, params);
                choose_target(self.kind, world, self.agent, &visible, params, self.leader_view)
            }
        };
        let mut probs = vec![0.0; Action::COUNT];
        match dest {
            None => {
                for m in Action::MOVES {
                    probs[m.index()] = 0.25;
                }
            }
            Some(d) if world.item_at(d).is_some() && loc.is_adjacent(d) => {
                probs[Action::Load.index()] = 1.0;
            }
            Some(d) => {
                probs[first_move(world, loc, d).index()] = 1.0;
            }
        }
        (probs, dest)
    }
}

impl AgentType for ForagingType {
    type World = ForagingState;

    fn name(&self) -> &str {
        self.kind.name()
    }

    fn bounds(&self) -> &[Bounds] {
        &FORAGING_BOUNDS
    }

    fn markovian(&self) -> &[bool] {
        &NON_MARKOVIAN
    }

    fn action_count(&self) -> usize {
        Action::COUNT
    }

    fn reset(&mut self) {
        self.memory = None;
    }

    fn step(&mut self, world: &ForagingState, params: &ParameterVector) -> ActionDistribution {
        let (probs, dest) = self.decide(world, params);
        self.memory = dest;
        ActionDistribution::from_weights(probs).mixed(ACTION_MIXING)
    }
}
