//! Budgeted global maximisation of the whole-history log-likelihood with
//! Bayesian optimisation (GP surrogate + expected improvement).

use rand::seq::index::sample as sample_indices;
use rand::Rng;

use super::gp::{GpSurrogate, DEFAULT_JITTER};
use super::{history_objective, EstimationError};
use crate::model::{AgentType, Bounds, Observation, ParameterVector};

pub const DEFAULT_BUDGET: usize = 10;
pub const DEFAULT_CANDIDATES: usize = 1000;
/// Kernel length-scale as a fraction of each parameter's range.
pub const LENGTH_SCALE_FRACTION: f64 = 0.3;

/// Where the acquisition step looks for the next point.
#[derive(Debug, Clone, Copy)]
pub enum Candidates<'a> {
    /// Fresh uniform candidates each iteration.
    Random(usize),
    /// A fixed candidate set. The initial design is drawn from it and each
    /// candidate is evaluated at most once.
    Fixed(&'a [ParameterVector]),
}

#[derive(Debug, Clone)]
pub struct EgoOutcome {
    pub best: ParameterVector,
    pub best_value: f64,
    pub evaluated: Vec<(ParameterVector, f64)>,
}

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Halton points in the box, randomly shifted modulo one per dimension.
pub fn shifted_halton<R: Rng + ?Sized>(bounds: &[Bounds], n: usize, rng: &mut R) -> Vec<ParameterVector> {
    let shift: Vec<f64> = bounds.iter().map(|_| rng.gen()).collect();
    (1..=n as u64)
        .map(|i| {
            let values = bounds
                .iter()
                .enumerate()
                .map(|(d, b)| {
                    let u = (radical_inverse(i, PRIMES[d % PRIMES.len()]) + shift[d]).fract();
                    b.min + u * b.width()
                })
                .collect();
            ParameterVector::clamped(values, bounds.to_vec())
        })
        .collect()
}

fn argmax(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

fn unit_coords(p: &ParameterVector) -> Vec<f64> {
    p.values()
        .iter()
        .zip(p.bounds())
        .map(|(v, b)| (v - b.min) / b.width())
        .collect()
}

/// Maximises `objective` over the box with exactly `budget` evaluations:
/// `max(2, budget / 2)` quasi-random initial points, then one point per
/// iteration chosen by maximal expected improvement. Returns the best point
/// evaluated (earliest on ties).
pub fn ego_maximise<F, R>(
    mut objective: F,
    bounds: &[Bounds],
    budget: usize,
    candidates: Candidates<'_>,
    rng: &mut R,
) -> Result<EgoOutcome, EstimationError>
where
    F: FnMut(&ParameterVector) -> f64,
    R: Rng + ?Sized,
{
    if budget < 2 {
        return Err(EstimationError::BudgetTooSmall(budget));
    }
    let n_init = (budget / 2).max(2).min(budget);
    let mut used: Vec<bool> = match candidates {
        Candidates::Fixed(c) => vec![false; c.len()],
        Candidates::Random(_) => Vec::new(),
    };
    let initial: Vec<ParameterVector> = match candidates {
        Candidates::Random(_) => shifted_halton(bounds, n_init, rng),
        Candidates::Fixed(c) => {
            let picks = sample_indices(rng, c.len(), n_init.min(c.len()));
            picks
                .into_iter()
                .map(|i| {
                    used[i] = true;
                    c[i].clone()
                })
                .collect()
        }
    };
    let mut evaluated: Vec<(ParameterVector, f64)> = initial
        .into_iter()
        .map(|p| {
            let y = objective(&p);
            (p, y)
        })
        .collect();

    // Kernel works in unit coordinates, so the length-scale is the fraction.
    let length_scales = vec![LENGTH_SCALE_FRACTION; bounds.len()];
    while evaluated.len() < budget {
        let finite: Vec<f64> = evaluated
            .iter()
            .map(|(_, y)| if y.is_finite() { *y } else { f64::MIN / 4.0 })
            .collect();
        let mean = finite.iter().sum::<f64>() / finite.len() as f64;
        let var = finite.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / finite.len() as f64;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        let standardised: Vec<f64> = finite.iter().map(|y| (y - mean) / sd).collect();
        let best = standardised.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gp = GpSurrogate::fit(
            evaluated.iter().map(|(p, _)| unit_coords(p)).collect(),
            standardised,
            length_scales.clone(),
            1.0,
            DEFAULT_JITTER,
            0.0,
        )?;

        let next = match candidates {
            Candidates::Random(n) => {
                let pool: Vec<ParameterVector> = (0..n.max(1))
                    .map(|_| ParameterVector::uniform(bounds.to_vec(), rng))
                    .collect();
                let i = argmax(pool.iter().map(|p| gp.expected_improvement(&unit_coords(p), best)))
                    .expect("pool is nonempty");
                pool[i].clone()
            }
            Candidates::Fixed(c) => {
                let open: Vec<usize> = (0..c.len()).filter(|&i| !used[i]).collect();
                let Some(j) = argmax(
                    open.iter()
                        .map(|&i| gp.expected_improvement(&unit_coords(&c[i]), best)),
                ) else {
                    break;
                };
                used[open[j]] = true;
                c[open[j]].clone()
            }
        };
        let y = objective(&next);
        evaluated.push((next, y));
    }

    let i = argmax(evaluated.iter().map(|(_, y)| *y)).expect("budget >= 2");
    Ok(EgoOutcome {
        best: evaluated[i].0.clone(),
        best_value: evaluated[i].1,
        evaluated,
    })
}

/// EGO estimate for `ty` given the full observation history of `agent`.
pub fn ego_update<T: AgentType, R: Rng + ?Sized>(
    ty: &T,
    history: &[Observation<T::World>],
    agent: usize,
    budget: usize,
    rng: &mut R,
) -> Result<ParameterVector, EstimationError> {
    let objective = history_objective(ty, history, agent);
    ego_maximise(
        objective,
        ty.bounds(),
        budget,
        Candidates::Random(DEFAULT_CANDIDATES),
        rng,
    )
    .map(|o| o.best)
}
