//! Parameter estimators for a single type.
//!
//! * [`aga`]: gradient ascent on a polynomial fit of the latest likelihood.
//! * [`abu`]: polynomial posterior per parameter, updated by polynomial product.
//! * [`ego`]: Bayesian optimisation of the whole-history likelihood.
//!
//! AGA and ABU look at one observation at a time through a [`Likelihood`]
//! closure; EGO sees the log-likelihood of the full history.

pub mod abu;
pub mod aga;
pub mod ego;
pub mod gp;
pub mod poly;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::LIKELIHOOD_FLOOR;
use crate::model::{
    action_probabilities, history_log_likelihood, AgentType, Observation, ParameterVector,
};

pub use abu::{abu_update, ParameterPosterior};
pub use aga::aga_update;
pub use ego::{ego_maximise, ego_update, Candidates, EgoOutcome, DEFAULT_BUDGET};
pub use gp::{expected_improvement, GpSurrogate};
pub use poly::{Polynomial, FIT_DEGREE};

/// Number of uniformly spaced points per parameter used to fit likelihoods.
pub const PROFILE_POINTS: usize = FIT_DEGREE + 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("need {needed} distinct sample points, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("singular system")]
    Singular,
    #[error("kernel matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("surrogate has no data")]
    EmptySurrogate,
    #[error("budget must be at least 2, got {0}")]
    BudgetTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// No updates; estimates stay at their initial values.
    #[default]
    None,
    Aga,
    Abu,
    Ego,
}

impl std::str::FromStr for EstimatorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "aga" => Ok(Self::Aga),
            "abu" => Ok(Self::Abu),
            "ego" => Ok(Self::Ego),
            other => Err(format!("unknown estimator '{other}'")),
        }
    }
}

/// A likelihood `f(p)` of one observed action as a function of the parameters.
pub trait Likelihood {
    fn eval(&self, params: &ParameterVector) -> f64;
}

impl<F: Fn(&ParameterVector) -> f64> Likelihood for F {
    fn eval(&self, params: &ParameterVector) -> f64 {
        self(params)
    }
}

/// Probability that `ty` assigns to the observed action at the end of
/// `history`, as a function of the parameters. Internal state is rebuilt
/// from scratch for every evaluation.
pub struct ObservedActionLikelihood<'a, T: AgentType> {
    pub ty: &'a T,
    pub history: &'a [Observation<T::World>],
    pub action: usize,
}

impl<T: AgentType> Likelihood for ObservedActionLikelihood<'_, T> {
    fn eval(&self, params: &ParameterVector) -> f64 {
        action_probabilities(self.ty, self.history, params)
            .and_then(|d| d.prob(self.action))
            .unwrap_or(LIKELIHOOD_FLOOR)
    }
}

/// Likelihood profile along parameter `k`: five uniformly spaced points over
/// its bounds, other coordinates pinned at `pinned`.
pub fn sample_likelihood_profile<L: Likelihood + ?Sized>(
    f: &L,
    pinned: &ParameterVector,
    k: usize,
) -> Vec<(f64, f64)> {
    pinned.bounds()[k]
        .grid(PROFILE_POINTS)
        .into_iter()
        .map(|x| (x, f.eval(&pinned.with(k, x)).clamp(LIKELIHOOD_FLOOR, 1.0)))
        .collect()
}

/// Degree-4 fit of every parameter's likelihood profile.
pub fn fit_profiles<L: Likelihood + ?Sized>(
    f: &L,
    pinned: &ParameterVector,
) -> Vec<Polynomial> {
    (0..pinned.len())
        .map(|k| {
            let samples = sample_likelihood_profile(f, pinned, k);
            Polynomial::fit(&samples, FIT_DEGREE, pinned.bounds()[k])
                .expect("profile grid has distinct abscissae")
        })
        .collect()
}

/// Whole-history log-likelihood objective for `agent`.
pub fn history_objective<'a, T: AgentType>(
    ty: &'a T,
    history: &'a [Observation<T::World>],
    agent: usize,
) -> impl Fn(&ParameterVector) -> f64 + 'a {
    move |p| history_log_likelihood(ty, history, agent, p).unwrap_or(f64::NEG_INFINITY)
}
