//! Gaussian-process surrogate with a squared-exponential ARD kernel.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::EstimationError;

pub const DEFAULT_JITTER: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GpSurrogate {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    length_scales: Vec<f64>,
    signal_variance: f64,
    jitter: f64,
    prior_mean: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl GpSurrogate {
    /// Conditions the GP on `(points, values)`. Points and length-scales must
    /// share one dimension.
    pub fn fit(
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        length_scales: Vec<f64>,
        signal_variance: f64,
        jitter: f64,
        prior_mean: f64,
    ) -> Result<Self, EstimationError> {
        if points.is_empty() {
            return Err(EstimationError::EmptySurrogate);
        }
        assert_eq!(points.len(), values.len());
        let n = points.len();
        let kernel = |a: &[f64], b: &[f64]| se_ard(a, b, &length_scales, signal_variance);
        let k = DMatrix::from_fn(n, n, |i, j| {
            kernel(&points[i], &points[j]) + if i == j { jitter } else { 0.0 }
        });
        let chol = Cholesky::new(k).ok_or(EstimationError::NotPositiveDefinite)?;
        let centred = DVector::from_iterator(n, values.iter().map(|y| y - prior_mean));
        let alpha = chol.solve(&centred);
        Ok(Self {
            points,
            values,
            length_scales,
            signal_variance,
            jitter,
            prior_mean,
            chol,
            alpha,
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Posterior mean and variance at `query`.
    pub fn posterior(&self, query: &[f64]) -> (f64, f64) {
        let n = self.points.len();
        let kstar = DVector::from_iterator(
            n,
            self.points
                .iter()
                .map(|p| se_ard(p, query, &self.length_scales, self.signal_variance)),
        );
        let mean = self.prior_mean + kstar.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kstar)
            .expect("cholesky factor is nonsingular");
        let var = (self.signal_variance - v.dot(&v)).max(0.0);
        (mean, var)
    }

    pub fn expected_improvement(&self, query: &[f64], best_so_far: f64) -> f64 {
        let (mean, var) = self.posterior(query);
        expected_improvement(mean, var.sqrt(), best_so_far)
    }
}

fn se_ard(a: &[f64], b: &[f64], length_scales: &[f64], signal_variance: f64) -> f64 {
    let r2: f64 = a
        .iter()
        .zip(b)
        .zip(length_scales)
        .map(|((x, y), l)| ((x - y) / l).powi(2))
        .sum();
    signal_variance * (-0.5 * r2).exp()
}

/// Expected improvement over `best` for a maximisation problem.
pub fn expected_improvement(mean: f64, sd: f64, best: f64) -> f64 {
    if !(sd > 0.0) {
        return (mean - best).max(0.0);
    }
    let std_normal = Normal::standard();
    let z = (mean - best) / sd;
    ((mean - best) * std_normal.cdf(z) + sd * std_normal.pdf(z)).max(0.0)
}
