//! Blackbox agent types: parameter vectors, action distributions, observation
//! histories and internal-state replay.
//!
//! A type maps an interaction history to a distribution over the modelled
//! agent's actions. Types may carry an internal state that is advanced one
//! observation at a time. When that state depends on the parameter values
//! (non-Markovian parameters), changing the parameters requires rebuilding the
//! state from the start of the history, which [`replay`] does.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lower bound applied to every action probability a type may emit.
pub const MIN_ACTION_PROB: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {index} = {value} outside [{min}, {max}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("expected {expected} parameters, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid bounds [{min}, {max}]")]
    InvalidBounds { min: f64, max: f64 },
    #[error("history is empty")]
    EmptyHistory,
    #[error("action {action} outside action space of size {size}")]
    UnknownAction { action: usize, size: usize },
    #[error("distribution does not sum to one (sum = {0})")]
    NotNormalised(f64),
}

/// Closed interval `[min, max]` with `min < max`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn new(min: f64, max: f64) -> Result<Self, ModelError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(ModelError::InvalidBounds { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.min, self.max)
    }

    /// `n` evenly spaced points covering the interval, endpoints included.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.min + self.max)],
            _ => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.max
                    } else {
                        self.min + self.width() * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// A point in a bounded box. Values always lie inside their bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    values: Vec<f64>,
    bounds: Vec<Bounds>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>, bounds: Vec<Bounds>) -> Result<Self, ModelError> {
        if values.len() != bounds.len() {
            return Err(ModelError::DimensionMismatch {
                expected: bounds.len(),
                got: values.len(),
            });
        }
        for (index, (&value, b)) in values.iter().zip(&bounds).enumerate() {
            if !b.contains(value) {
                return Err(ModelError::OutOfBounds {
                    index,
                    value,
                    min: b.min,
                    max: b.max,
                });
            }
        }
        Ok(Self { values, bounds })
    }

    /// Builds a vector by projecting `values` onto the box.
    pub fn clamped(values: Vec<f64>, bounds: Vec<Bounds>) -> Self {
        assert_eq!(values.len(), bounds.len(), "dimension mismatch");
        let values = values
            .iter()
            .zip(&bounds)
            .map(|(&v, b)| b.clamp(v))
            .collect();
        Self { values, bounds }
    }

    /// Midpoint of every interval.
    pub fn centre(bounds: Vec<Bounds>) -> Self {
        let values = bounds.iter().map(|b| 0.5 * (b.min + b.max)).collect();
        Self { values, bounds }
    }

    pub fn uniform<R: rand::Rng + ?Sized>(bounds: Vec<Bounds>, rng: &mut R) -> Self {
        let values = bounds.iter().map(|b| rng.gen_range(b.min..=b.max)).collect();
        Self { values, bounds }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Copy with coordinate `k` replaced by `x` (projected onto its bounds).
    pub fn with(&self, k: usize, x: f64) -> Self {
        let mut out = self.clone();
        out.values[k] = self.bounds[k].clamp(x);
        out
    }

    /// Checks that `self` lives in the box `bounds`.
    pub fn check_bounds(&self, bounds: &[Bounds]) -> Result<(), ModelError> {
        if bounds.len() != self.values.len() {
            return Err(ModelError::DimensionMismatch {
                expected: bounds.len(),
                got: self.values.len(),
            });
        }
        for (index, (&value, b)) in self.values.iter().zip(bounds).enumerate() {
            if !b.contains(value) {
                return Err(ModelError::OutOfBounds {
                    index,
                    value,
                    min: b.min,
                    max: b.max,
                });
            }
        }
        Ok(())
    }
}

/// Dense distribution over an enumerated action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, ModelError> {
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(ModelError::NotNormalised(sum));
        }
        Ok(Self { probs })
    }

    /// Normalises nonnegative weights. All-zero weights become uniform.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            Self {
                probs: weights.into_iter().map(|w| w / sum).collect(),
            }
        } else {
            let n = weights.len().max(1) as f64;
            Self {
                probs: vec![1.0 / n; weights.len()],
            }
        }
    }

    /// Adds `eps` to every action and renormalises.
    pub fn mixed(mut self, eps: f64) -> Self {
        for p in &mut self.probs {
            *p += eps;
        }
        Self::from_weights(self.probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, action: usize) -> Result<f64, ModelError> {
        self.probs
            .get(action)
            .copied()
            .ok_or(ModelError::UnknownAction {
                action,
                size: self.probs.len(),
            })
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Inverse-CDF draw from a uniform variate `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (a, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return a;
            }
        }
        self.probs.len() - 1
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng.gen::<f64>())
    }
}

/// What the controlled agent observes at step `t`: the full world and the
/// actions every agent took at `t - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation<W> {
    pub step: usize,
    pub world: W,
    /// `None` at `t = 0`.
    pub prev_actions: Option<Vec<usize>>,
}

impl<W> Observation<W> {
    pub fn initial(world: W) -> Self {
        Self {
            step: 0,
            world,
            prev_actions: None,
        }
    }

    pub fn action_of(&self, agent: usize) -> Option<usize> {
        self.prev_actions.as_ref().and_then(|a| a.get(agent).copied())
    }
}

/// A hypothetical behaviour of another agent.
///
/// Implementations hold their internal state in `self`. [`AgentType::step`]
/// consumes the newest world snapshot, returns the distribution over the
/// agent's next action and advances the internal state. Stepping must be a
/// pure function of (initial state, observations, parameters).
pub trait AgentType: Clone {
    type World;

    fn name(&self) -> &str;

    fn bounds(&self) -> &[Bounds];

    /// One flag per parameter; `true` when past values never influence the
    /// current action probabilities.
    fn markovian(&self) -> &[bool];

    fn action_count(&self) -> usize;

    /// Restores the freshly constructed internal state.
    fn reset(&mut self);

    fn step(&mut self, world: &Self::World, params: &ParameterVector) -> ActionDistribution;

    fn is_markovian(&self) -> bool {
        self.markovian().iter().all(|&m| m)
    }
}

/// Rebuilds the internal state of `ty` by stepping a fresh copy through
/// `history` under `params`.
pub fn replay<T: AgentType>(
    ty: &T,
    history: &[Observation<T::World>],
    params: &ParameterVector,
) -> Result<T, ModelError> {
    params.check_bounds(ty.bounds())?;
    let mut fresh = ty.clone();
    fresh.reset();
    for obs in history {
        fresh.step(&obs.world, params);
    }
    Ok(fresh)
}

/// Distribution over the agent's action at the last observation of `history`,
/// with the internal state rebuilt from scratch under `params`.
pub fn action_probabilities<T: AgentType>(
    ty: &T,
    history: &[Observation<T::World>],
    params: &ParameterVector,
) -> Result<ActionDistribution, ModelError> {
    let (last, prefix) = history.split_last().ok_or(ModelError::EmptyHistory)?;
    let mut state = replay(ty, prefix, params)?;
    Ok(state.step(&last.world, params))
}

/// Sum of log-probabilities of the observed actions of `agent` over the whole
/// history: each `history[tau].prev_actions[agent]` is scored against the
/// distribution the type produced at `history[tau - 1]`. One replay pass.
pub fn history_log_likelihood<T: AgentType>(
    ty: &T,
    history: &[Observation<T::World>],
    agent: usize,
    params: &ParameterVector,
) -> Result<f64, ModelError> {
    params.check_bounds(ty.bounds())?;
    let mut state = ty.clone();
    state.reset();
    let mut total = 0.0;
    for pair in history.windows(2) {
        let dist = state.step(&pair[0].world, params);
        if let Some(a) = pair[1].action_of(agent) {
            total += dist.prob(a)?.max(MIN_ACTION_PROB).ln();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts how many observations exceeded a parameter-dependent threshold.
    #[derive(Clone)]
    struct Counter {
        bounds: Vec<Bounds>,
        seen: u32,
    }

    impl AgentType for Counter {
        type World = f64;
        fn name(&self) -> &str {
            "counter"
        }
        fn bounds(&self) -> &[Bounds] {
            &self.bounds
        }
        fn markovian(&self) -> &[bool] {
            &[false]
        }
        fn action_count(&self) -> usize {
            2
        }
        fn reset(&mut self) {
            self.seen = 0;
        }
        fn step(&mut self, world: &f64, params: &ParameterVector) -> ActionDistribution {
            if *world > params.get(0) {
                self.seen += 1;
            }
            let p = if self.seen % 2 == 0 { 0.9 } else { 0.1 };
            ActionDistribution::from_weights(vec![p, 1.0 - p]).mixed(0.01)
        }
    }

    fn counter() -> Counter {
        Counter {
            bounds: vec![Bounds::new(0.0, 1.0).unwrap()],
            seen: 0,
        }
    }

    fn history(xs: &[f64]) -> Vec<Observation<f64>> {
        xs.iter()
            .enumerate()
            .map(|(t, &x)| Observation {
                step: t,
                world: x,
                prev_actions: (t > 0).then(|| vec![0]),
            })
            .collect()
    }

    #[test]
    fn out_of_bounds_rejected() {
        let b = vec![Bounds::new(0.0, 1.0).unwrap()];
        assert!(ParameterVector::new(vec![1.5], b.clone()).is_err());
        let ok = ParameterVector::new(vec![0.5], b).unwrap();
        let wide = vec![Bounds::new(0.6, 1.0).unwrap()];
        assert!(matches!(
            action_probabilities(
                &Counter {
                    bounds: wide,
                    seen: 0
                },
                &history(&[0.1]),
                &ok
            ),
            Err(ModelError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(Bounds::new(1.0, 1.0).is_err());
        assert!(Bounds::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        let b = Bounds::new(0.1, 1.0).unwrap();
        let g = b.grid(5);
        let want = [0.1, 0.325, 0.55, 0.775, 1.0];
        for (x, w) in g.iter().zip(want) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_history_replay_is_fresh() {
        let mut c = counter();
        c.seen = 7;
        let p = ParameterVector::centre(c.bounds.clone());
        let r = replay(&c, &[], &p).unwrap();
        assert_eq!(r.seen, 0);
    }

    #[test]
    fn replay_matches_incremental_stepping() {
        let h = history(&[0.2, 0.8, 0.4, 0.9, 0.6]);
        let p = ParameterVector::new(vec![0.5], counter().bounds).unwrap();
        let mut inc = counter();
        for o in &h {
            inc.step(&o.world, &p);
        }
        assert_eq!(replay(&counter(), &h, &p).unwrap().seen, inc.seen);
    }

    #[test]
    fn mixing_keeps_positivity() {
        let d = ActionDistribution::from_weights(vec![1.0, 0.0, 0.0]).mixed(0.01);
        assert!(d.min_prob() > 0.0);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_likelihood_scores_each_transition() {
        let h = history(&[0.2, 0.8, 0.4]);
        let p = ParameterVector::new(vec![0.5], counter().bounds).unwrap();
        let ll = history_log_likelihood(&counter(), &h, 0, &p).unwrap();
        let mut direct = 0.0;
        for t in 1..h.len() {
            direct += action_probabilities(&counter(), &h[..t], &p)
                .unwrap()
                .prob(0)
                .unwrap()
                .ln();
        }
        assert!((ll - direct).abs() < 1e-12);
    }
}
