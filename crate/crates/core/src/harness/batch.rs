use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, WorldPreset};
use super::episode::{run_episode, EpisodeRecord};
use super::HarnessError;
use crate::foraging::{generate_instance, ForagingKind, Instance};

pub fn instance_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}

/// The instance sequence shared by every configuration with this base seed.
pub fn generate_instances(cfg: &ExperimentConfig) -> Result<Vec<Instance>, HarnessError> {
    (0..cfg.instances)
        .map(|i| generate_instance(&cfg.world_config(), instance_seed(cfg.base_seed, i)).map_err(HarnessError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub label: String,
    pub world: WorldPreset,
    pub instances: usize,
    pub completed: usize,
    pub completion_rate: f64,
    /// Over completed episodes only.
    pub mean_steps_completed: Option<f64>,
    pub std_steps_completed: Option<f64>,
    /// `[step][parameter]`, averaged over every other agent still running.
    pub mean_error_by_step: Vec<Vec<f64>>,
    /// Same, aligned from each episode's last step (index 0 is the last).
    pub mean_error_from_end: Vec<Vec<f64>>,
    pub mean_belief_by_step: Vec<f64>,
    pub mean_belief_from_end: Vec<f64>,
    pub mean_final_belief: f64,
    /// Mean seconds per step spent updating one agent's selected types.
    pub mean_update_seconds: Option<f64>,
    pub updates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub summary: Summary,
    /// Sorted by instance index.
    pub episodes: Vec<EpisodeRecord>,
}

/// Running mean of equally sized vectors, one slot per index.
#[derive(Default)]
struct SlotMeans {
    sums: Vec<Vec<f64>>,
    counts: Vec<usize>,
}

impl SlotMeans {
    fn add(&mut self, slot: usize, values: &[f64]) {
        if self.sums.len() <= slot {
            self.sums.resize(slot + 1, vec![0.0; values.len()]);
            self.counts.resize(slot + 1, 0);
        }
        for (s, v) in self.sums[slot].iter_mut().zip(values) {
            *s += v;
        }
        self.counts[slot] += 1;
    }

    fn means(&self) -> Vec<Vec<f64>> {
        self.sums
            .iter()
            .zip(&self.counts)
            .map(|(s, &n)| s.iter().map(|x| x / n as f64).collect())
            .collect()
    }
}

pub fn summarise(cfg: &ExperimentConfig, episodes: &[EpisodeRecord]) -> Summary {
    let completed: Vec<f64> = episodes.iter().filter(|e| e.completed).map(|e| e.steps as f64).collect();
    let n = completed.len();
    let mean_steps = (n > 0).then(|| completed.iter().sum::<f64>() / n as f64);
    let std_steps = mean_steps.map(|m| {
        if n < 2 {
            0.0
        } else {
            (completed.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        }
    });

    let (mut err, mut err_end, mut bel, mut bel_end) =
        (SlotMeans::default(), SlotMeans::default(), SlotMeans::default(), SlotMeans::default());
    let mut final_beliefs = Vec::new();
    let mut update_times = Vec::new();
    for ep in episodes {
        for r in &ep.records {
            let from_end = ep.steps - r.step;
            err.add(r.step, &r.errors);
            err_end.add(from_end, &r.errors);
            bel.add(r.step, &[r.belief_true_type]);
            bel_end.add(from_end, &[r.belief_true_type]);
            if from_end == 0 {
                final_beliefs.push(r.belief_true_type);
            }
            if !r.selected.is_empty() {
                update_times.push(r.update_seconds);
            }
        }
    }
    let flat = |m: &SlotMeans| m.means().into_iter().map(|v| v[0]).collect();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };

    Summary {
        label: cfg.label(),
        world: cfg.world,
        instances: episodes.len(),
        completed: n,
        completion_rate: if episodes.is_empty() { 0.0 } else { n as f64 / episodes.len() as f64 },
        mean_steps_completed: mean_steps,
        std_steps_completed: std_steps,
        mean_error_by_step: err.means(),
        mean_error_from_end: err_end.means(),
        mean_belief_by_step: flat(&bel),
        mean_belief_from_end: flat(&bel_end),
        mean_final_belief: mean(&final_beliefs),
        mean_update_seconds: (cfg.measure_time && !update_times.is_empty()).then(|| mean(&update_times)),
        updates: update_times.len(),
    }
}

/// Runs `cfg` on each instance in parallel and aggregates the results.
pub fn run_on_instances(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<BatchResult, HarnessError> {
    let job = || {
        let mut episodes: Vec<EpisodeRecord> = instances
            .par_iter()
            .enumerate()
            .map(|(i, inst)| run_episode(i, inst, cfg))
            .collect();
        episodes.sort_by_key(|e| e.instance);
        episodes
    };
    let episodes = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?
            .install(job),
        None => job(),
    };
    Ok(BatchResult {
        summary: summarise(cfg, &episodes),
        episodes,
    })
}

pub fn run_batch(cfg: &ExperimentConfig) -> Result<BatchResult, HarnessError> {
    if cfg.instances == 0 {
        return Err(HarnessError::InvalidConfig("instances must be at least 1".into()));
    }
    if cfg.ego_budget < 2 {
        return Err(HarnessError::InvalidConfig("ego_budget must be at least 2".into()));
    }
    let instances = generate_instances(cfg)?;
    run_on_instances(cfg, &instances)
}

fn type_names(selected: &[usize]) -> String {
    selected
        .iter()
        .map(|&k| ForagingKind::ALL[k].name())
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes `summary.json`, `per_step.csv`, `episodes.csv` and, when enabled,
/// one trace per episode.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, result: &BatchResult) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&result.summary)?)?;

    let mut steps = csv::Writer::from_path(dir.join("per_step.csv"))?;
    steps.write_record([
        "instance",
        "step",
        "agent",
        "belief_true_type",
        "err_p1",
        "err_p2",
        "err_p3",
        "selected_type",
        "update_seconds",
    ])?;
    for ep in &result.episodes {
        for r in &ep.records {
            let mut row = vec![
                ep.instance.to_string(),
                r.step.to_string(),
                r.agent.to_string(),
                r.belief_true_type.to_string(),
            ];
            row.extend(r.errors.iter().map(|e| e.to_string()));
            row.push(type_names(&r.selected));
            row.push(r.update_seconds.to_string());
            steps.write_record(&row)?;
        }
    }
    steps.flush()?;

    let mut eps = csv::Writer::from_path(dir.join("episodes.csv"))?;
    eps.write_record(["instance", "completed", "steps"])?;
    for ep in &result.episodes {
        eps.write_record([ep.instance.to_string(), ep.completed.to_string(), ep.steps.to_string()])?;
    }
    eps.flush()?;

    if cfg.traces {
        let traces = dir.join("traces");
        fs::create_dir_all(&traces)?;
        for ep in &result.episodes {
            ep.trace.save(&traces.join(format!("instance_{:04}.json", ep.instance)))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::EstimatorKind;

    fn small(instances: usize) -> ExperimentConfig {
        ExperimentConfig {
            estimator: EstimatorKind::Aga,
            rollouts: Some(20),
            instances,
            base_seed: 11,
            measure_time: false,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn repeat_runs_identical() {
        let a = run_batch(&small(3)).unwrap();
        let b = run_batch(&small(3)).unwrap();
        assert_eq!(
            serde_json::to_string(&a.summary).unwrap(),
            serde_json::to_string(&b.summary).unwrap()
        );
        assert_eq!(a.episodes, b.episodes);
    }

    #[test]
    fn completion_rate_in_unit_interval() {
        let s = run_batch(&small(3)).unwrap().summary;
        assert!((0.0..=1.0).contains(&s.completion_rate));
        assert_eq!(s.completion_rate, s.completed as f64 / s.instances as f64);
        assert_eq!(s.mean_error_by_step[0].len(), 3);
    }

    #[test]
    fn invariant_to_thread_count() {
        let one = run_batch(&ExperimentConfig { threads: Some(1), ..small(4) }).unwrap();
        let four = run_batch(&ExperimentConfig { threads: Some(4), ..small(4) }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn zero_instances_rejected() {
        assert!(matches!(run_batch(&small(0)), Err(HarnessError::InvalidConfig(_))));
    }

    #[test]
    fn same_instances_for_every_configuration() {
        let a = generate_instances(&small(5)).unwrap();
        let b = generate_instances(&small(5).baseline(crate::harness::Baseline::Cor)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn outputs_have_fixed_columns() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig { traces: true, ..small(2) };
        let result = run_batch(&cfg).unwrap();
        write_outputs(dir.path(), &cfg, &result).unwrap();
        let per_step = fs::read_to_string(dir.path().join("per_step.csv")).unwrap();
        assert_eq!(
            per_step.lines().next().unwrap(),
            "instance,step,agent,belief_true_type,err_p1,err_p2,err_p3,selected_type,update_seconds"
        );
        let rows: usize = result.episodes.iter().map(|e| e.records.len()).sum();
        assert_eq!(per_step.lines().count(), rows + 1);
        let episodes = fs::read_to_string(dir.path().join("episodes.csv")).unwrap();
        assert_eq!(episodes.lines().next().unwrap(), "instance,completed,steps");
        let summary: Summary =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary, result.summary);
        let trace = super::super::Trace::load(&dir.path().join("traces/instance_0001.json")).unwrap();
        let report = trace.replay().unwrap();
        assert!(report.consistent);
        assert_eq!(report.steps, result.episodes[1].steps);
    }
}
