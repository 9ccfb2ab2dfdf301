use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Baseline, ExperimentConfig, InitialEstimates};
use super::trace::{Trace, TraceStep};
use crate::belief::TypeBelief;
use crate::estimation::{
    abu_update, aga_update, ego_update, EstimatorKind, ObservedActionLikelihood,
    ParameterPosterior,
};
use crate::foraging::{Action, ForagingKind, ForagingState, ForagingType, Instance};
use crate::model::{replay, AgentType, Observation, ParameterVector, MIN_ACTION_PROB};
use crate::planner::{AgentModel, Planner, PlanningContext};
use crate::selection::{bandit_reward, select_all, select_posterior, BanditStats, SelectionPolicy};

const WORLD_STREAM: u64 = 1;
const PLANNER_STREAM: u64 = 2;
const ESTIMATOR_STREAM: u64 = 3;

/// Metrics for one other agent at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Index of the other agent in the world.
    pub agent: usize,
    pub belief: Vec<f64>,
    pub belief_true_type: f64,
    /// Current estimate for the agent's true type.
    pub estimate: Vec<f64>,
    /// `|true - estimate|` per parameter for the true type.
    pub errors: Vec<f64>,
    /// Types whose estimates were updated at this step.
    pub selected: Vec<usize>,
    pub update_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub instance: usize,
    pub seed: u64,
    pub completed: bool,
    pub steps: usize,
    pub records: Vec<StepRecord>,
    pub trace: Trace,
}

/// What the controlled agent maintains about one (other agent, type) pair.
struct TypeModel {
    estimate: ParameterVector,
    posterior: ParameterPosterior,
    /// Internal state after consuming every observation but the newest.
    live: ForagingType,
}

struct AgentTracker {
    agent: usize,
    true_kind: ForagingKind,
    true_params: ParameterVector,
    belief: TypeBelief,
    bandit: BanditStats,
    types: Vec<TypeModel>,
}

impl AgentTracker {
    fn record(&self, step: usize, selected: Vec<usize>, update_seconds: f64) -> StepRecord {
        let est = &self.types[self.true_kind.index()].estimate;
        StepRecord {
            step,
            agent: self.agent,
            belief: self.belief.probs().to_vec(),
            belief_true_type: self.belief.probs()[self.true_kind.index()],
            estimate: est.values().to_vec(),
            errors: est
                .values()
                .iter()
                .zip(self.true_params.values())
                .map(|(e, t)| (t - e).abs())
                .collect(),
            selected,
            update_seconds,
        }
    }
}

fn starting_estimate(inst: &Instance, j: usize, kind: ForagingKind, initial: InitialEstimates) -> ParameterVector {
    if initial == InitialEstimates::Correct && inst.true_kinds[j] == kind {
        inst.true_params[j].clone()
    } else {
        inst.initial_estimates[j][kind.index()].clone()
    }
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs one episode of `inst` under `cfg`: at every step the estimates and
/// beliefs are updated from the newest observation, then the controlled
/// agent plans and everyone acts.
pub fn run_episode(index: usize, inst: &Instance, cfg: &ExperimentConfig) -> EpisodeRecord {
    let mut world_rng = rng_stream(inst.seed, WORLD_STREAM);
    let mut planner_rng = rng_stream(inst.seed, PLANNER_STREAM);
    let mut est_rng = rng_stream(inst.seed, ESTIMATOR_STREAM);

    let mut trackers: Vec<AgentTracker> = (0..inst.other_agents())
        .map(|j| AgentTracker {
            agent: j + 1,
            true_kind: inst.true_kinds[j],
            true_params: inst.true_params[j].clone(),
            belief: TypeBelief::uniform(ForagingKind::ALL.len()),
            bandit: BanditStats::new(ForagingKind::ALL.len()),
            types: ForagingKind::ALL
                .iter()
                .map(|&k| {
                    let estimate = starting_estimate(inst, j, k, cfg.initial);
                    TypeModel {
                        posterior: ParameterPosterior::uniform(estimate.bounds()),
                        estimate,
                        live: ForagingType::new(k, j + 1).with_leader_view(cfg.leader_view),
                    }
                })
                .collect(),
        })
        .collect();
    let mut actual: Vec<ForagingType> = (0..inst.other_agents())
        .map(|j| ForagingType::new(inst.true_kinds[j], j + 1).with_leader_view(cfg.leader_view))
        .collect();

    let mut world = inst.world.clone();
    let mut history = vec![Observation::initial(world.clone())];
    let mut records: Vec<StepRecord> = trackers.iter().map(|t| t.record(0, Vec::new(), 0.0)).collect();
    let mut planner = Planner::new(cfg.planner());
    let mut trace_steps = Vec::new();
    let max_steps = inst.config.max_steps;

    while !world.all_collected() && world.step < max_steps {
        let models: Vec<AgentModel> = trackers
            .iter()
            .map(|tr| AgentModel {
                belief: tr.belief.clone(),
                types: tr.types.iter().map(|m| (m.live.clone(), m.estimate.clone())).collect(),
            })
            .collect();
        let ctx = PlanningContext {
            world: &world,
            others: &models,
            steps_left: max_steps - world.step,
        };
        let plan_seed: u64 = planner_rng.gen();
        let mine = planner.plan(&ctx, &mut ChaCha8Rng::seed_from_u64(plan_seed));

        let mut actions = vec![mine];
        for (j, ty) in actual.iter_mut().enumerate() {
            let dist = ty.step(&world, &inst.true_params[j]);
            actions.push(Action::ALL[dist.sample(&mut world_rng)]);
        }
        let move_seed: u64 = world_rng.gen();
        let reward = world
            .apply(&actions, &mut ChaCha8Rng::seed_from_u64(move_seed))
            .expect("one action per agent");
        let ids: Vec<usize> = actions.iter().map(|a| a.index()).collect();
        trace_steps.push(TraceStep {
            actions: ids.clone(),
            move_seed,
            plan_seed,
            reward,
        });
        history.push(Observation {
            step: world.step,
            world: world.clone(),
            prev_actions: Some(ids),
        });
        planner.advance(mine, &world);

        for tracker in &mut trackers {
            records.push(update_tracker(tracker, &history, cfg, &mut est_rng));
        }
    }

    EpisodeRecord {
        instance: index,
        seed: inst.seed,
        completed: world.all_collected(),
        steps: world.step,
        records,
        trace: Trace {
            instance: inst.clone(),
            label: cfg.label(),
            steps: trace_steps,
            completed: world.all_collected(),
            final_digest: world.digest(),
        },
    }
}

/// Estimation and belief update for one other agent after the newest
/// observation `history[t]`, which carries the agent's action at `t - 1`.
fn update_tracker<R: Rng + ?Sized>(
    tr: &mut AgentTracker,
    history: &[Observation<ForagingState>],
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> StepRecord {
    let t = history.len() - 1;
    let action = history[t].action_of(tr.agent).expect("joint action recorded");
    let selected: Vec<usize> = if cfg.estimator == EstimatorKind::None {
        Vec::new()
    } else {
        match cfg.selection {
            SelectionPolicy::All => select_all(tr.types.len()).into_iter().collect(),
            SelectionPolicy::Posterior => vec![select_posterior(&tr.belief, rng)],
            SelectionPolicy::Ucb1 => tr.bandit.select_ucb1().into_iter().collect(),
        }
    };

    let mut seconds = 0.0;
    for &k in &selected {
        let model = &mut tr.types[k];
        let template = ForagingType::new(model.live.kind, tr.agent).with_leader_view(cfg.leader_view);
        let likelihood = ObservedActionLikelihood {
            ty: &template,
            history: &history[..t],
            action,
        };
        let start = cfg.measure_time.then(Instant::now);
        let next = match cfg.estimator {
            EstimatorKind::None => unreachable!("no types selected without an estimator"),
            EstimatorKind::Aga => aga_update(&likelihood, &model.estimate),
            EstimatorKind::Abu => {
                let (posterior, estimate) = abu_update(&model.posterior, &likelihood, &model.estimate, rng);
                model.posterior = posterior;
                estimate
            }
            EstimatorKind::Ego => ego_update(&template, history, tr.agent, cfg.ego_budget, rng)
                .unwrap_or_else(|_| model.estimate.clone()),
        };
        if let Some(start) = start {
            seconds += start.elapsed().as_secs_f64();
        }
        if cfg.selection == SelectionPolicy::Ucb1 {
            let reward = bandit_reward(&next, &model.estimate).expect("same parameter box");
            tr.bandit.record_reward(k, reward).expect("selected arm exists");
        }
        if next != model.estimate {
            model.live = replay(&template, &history[..t - 1], &next).expect("estimate inside bounds");
            model.estimate = next;
        }
    }

    let likelihoods: Vec<f64> = tr
        .types
        .iter_mut()
        .map(|m| {
            m.live
                .step(&history[t - 1].world, &m.estimate)
                .prob(action)
                .unwrap_or(MIN_ACTION_PROB)
        })
        .collect();
    tr.belief = tr.belief.update(&likelihoods).expect("one likelihood per type");
    tr.record(t, selected, seconds)
}

/// Fixed-parameter reference run of `inst`.
pub fn run_baseline(index: usize, inst: &Instance, cfg: &ExperimentConfig, kind: Baseline) -> EpisodeRecord {
    run_episode(index, inst, &cfg.baseline(kind))
}
