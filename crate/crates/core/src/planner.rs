//! UCT for the controlled agent.
//!
//! Each rollout samples one type per other agent from the current belief and
//! keeps it for the whole rollout. Other agents act by sampling from their
//! type's distribution under the current parameter estimate. Children are
//! keyed by (action, digest of the resulting world), so the stochastic
//! outcome of a joint step selects the child.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::TypeBelief;
use crate::foraging::{Action, ForagingState, ForagingType, WorldConfig};
use crate::model::{AgentType, ParameterVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub rollouts: usize,
    pub horizon: usize,
    pub discount: f64,
    pub exploration: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            rollouts: 300,
            horizon: 100,
            discount: 0.95,
            exploration: 2.0,
        }
    }
}

impl PlannerConfig {
    /// 300 rollouts for the small world, 500 for anything larger.
    pub fn for_world(world: &WorldConfig) -> Self {
        let rollouts = if world.width * world.height <= 100 { 300 } else { 500 };
        Self {
            rollouts,
            ..Self::default()
        }
    }
}

/// The planner's view of one other agent: belief over its types and, per
/// type, the type (with its internal state as of the previous observation)
/// and its current parameter estimate.
#[derive(Debug, Clone)]
pub struct AgentModel {
    pub belief: TypeBelief,
    pub types: Vec<(ForagingType, ParameterVector)>,
}

#[derive(Debug, Clone, Copy)]
pub struct PlanningContext<'a> {
    pub world: &'a ForagingState,
    /// One entry per other agent, in agent order (agent `j` at `j - 1`).
    pub others: &'a [AgentModel],
    /// Steps left in the episode; rollouts never look past it.
    pub steps_left: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchNode {
    visits: u64,
    action_visits: [u64; Action::COUNT],
    action_values: [f64; Action::COUNT],
    children: HashMap<(Action, u64), SearchNode>,
}

impl SearchNode {
    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn action_visits(&self) -> &[u64; Action::COUNT] {
        &self.action_visits
    }

    /// Mean normalised discounted return per action.
    pub fn action_values(&self) -> &[f64; Action::COUNT] {
        &self.action_values
    }

    pub fn children(&self) -> &HashMap<(Action, u64), SearchNode> {
        &self.children
    }

    fn select(&self, c: f64) -> Action {
        if let Some(i) = self.action_visits.iter().position(|&n| n == 0) {
            return Action::ALL[i];
        }
        let ln_n = (self.visits as f64).ln();
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..Action::COUNT {
            let score =
                self.action_values[i] + c * (ln_n / self.action_visits[i] as f64).sqrt();
            if score > best.1 {
                best = (i, score);
            }
        }
        Action::ALL[best.0]
    }

    fn record(&mut self, a: Action, value: f64) {
        let i = a.index();
        self.visits += 1;
        self.action_visits[i] += 1;
        self.action_values[i] += (value - self.action_values[i]) / self.action_visits[i] as f64;
    }

    /// Most visited action; ties by mean value, then action order.
    pub fn best_action(&self) -> Action {
        let mut best = 0;
        for i in 1..Action::COUNT {
            let (n, bn) = (self.action_visits[i], self.action_visits[best]);
            if n > bn || (n == bn && self.action_values[i] > self.action_values[best]) {
                best = i;
            }
        }
        Action::ALL[best]
    }
}

/// Promotes the child reached by `taken` and `observed` to the root, or
/// returns a fresh root when that outcome was never simulated.
pub fn reuse_subtree(mut tree: SearchNode, taken: Action, observed: &ForagingState) -> SearchNode {
    tree.children
        .remove(&(taken, observed.digest()))
        .unwrap_or_default()
}

/// One rollout's world with the sampled other-agent behaviours.
struct Simulation<'a> {
    world: ForagingState,
    others: Vec<(ForagingType, &'a ParameterVector)>,
    actions: Vec<Action>,
}

impl Simulation<'_> {
    fn step<R: Rng + ?Sized>(&mut self, mine: Action, rng: &mut R) -> f64 {
        self.actions[0] = mine;
        for (j, (ty, params)) in self.others.iter_mut().enumerate() {
            let dist = ty.step(&self.world, params);
            self.actions[j + 1] = Action::ALL[dist.sample(rng)];
        }
        self.world
            .apply(&self.actions, rng)
            .expect("one action per agent") as f64
    }
}

#[derive(Debug, Clone, Default)]
pub struct Planner {
    pub config: PlannerConfig,
    root: SearchNode,
}

impl Planner {
    pub fn new(config: PlannerConfig) -> Self {
        Self {
            config,
            root: SearchNode::default(),
        }
    }

    pub fn root(&self) -> &SearchNode {
        &self.root
    }

    /// Runs the configured number of rollouts from `ctx.world` and returns
    /// the recommended action.
    pub fn plan<R: Rng + ?Sized>(&mut self, ctx: &PlanningContext<'_>, rng: &mut R) -> Action {
        let horizon = self.config.horizon.min(ctx.steps_left);
        let norm = ctx.world.remaining_items().max(1) as f64;
        for _ in 0..self.config.rollouts {
            let others = ctx
                .others
                .iter()
                .map(|m| {
                    let k = sample_index(m.belief.probs(), rng.gen());
                    let (ty, p) = &m.types[k];
                    (ty.clone(), p)
                })
                .collect();
            let mut sim = Simulation {
                world: ctx.world.clone(),
                others,
                actions: vec![Action::Load; ctx.world.agents.len()],
            };
            simulate(&mut self.root, &mut sim, 0, horizon, norm, &self.config, rng);
        }
        self.root.best_action()
    }

    /// Moves the root to the observed outcome of the action taken.
    pub fn advance(&mut self, taken: Action, observed: &ForagingState) {
        let tree = std::mem::take(&mut self.root);
        self.root = reuse_subtree(tree, taken, observed);
    }
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last = k;
            acc += p;
            if u < acc {
                return k;
            }
        }
    }
    last
}

/// Discounted return from `node`, expanding one new node per call.
fn simulate<R: Rng + ?Sized>(
    node: &mut SearchNode,
    sim: &mut Simulation<'_>,
    depth: usize,
    horizon: usize,
    norm: f64,
    cfg: &PlannerConfig,
    rng: &mut R,
) -> f64 {
    if depth >= horizon || sim.world.all_collected() {
        return 0.0;
    }
    let a = node.select(cfg.exploration);
    let reward = sim.step(a, rng);
    let key = (a, sim.world.digest());
    let future = match node.children.get_mut(&key) {
        Some(child) => simulate(child, sim, depth + 1, horizon, norm, cfg, rng),
        None => {
            node.children.insert(key, SearchNode::default());
            rollout(sim, depth + 1, horizon, cfg.discount, rng)
        }
    };
    let ret = reward + cfg.discount * future;
    node.record(a, ret / norm);
    ret
}

/// Uniformly random play for the controlled agent until the horizon.
fn rollout<R: Rng + ?Sized>(
    sim: &mut Simulation<'_>,
    mut depth: usize,
    horizon: usize,
    discount: f64,
    rng: &mut R,
) -> f64 {
    let mut total = 0.0;
    let mut weight = 1.0;
    while depth < horizon && !sim.world.all_collected() {
        let a = Action::ALL[rng.gen_range(0..Action::COUNT)];
        total += weight * sim.step(a, rng);
        weight *= discount;
        depth += 1;
    }
    total
}
