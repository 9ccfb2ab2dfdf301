//! Approximate Bayesian updating with polynomial densities.
//!
//! Each parameter carries its own degree-4 density over its bounds. An update
//! multiplies the density by the fitted likelihood profile, re-samples the
//! degree-8 product on the five-point grid, refits a quartic and normalises
//! it by its absolute integral.

use rand::Rng;

use super::{fit_profiles, Likelihood, Polynomial, FIT_DEGREE, PROFILE_POINTS};
use crate::model::{Bounds, ParameterVector};

/// Floor on product samples before refitting, so that negative lobes of the
/// product are not carried into the next density.
pub const PRODUCT_FLOOR: f64 = 1e-6;
/// Samples averaged into a point estimate.
pub const ESTIMATE_SAMPLES: usize = 10;
/// Resolution of the cumulative table used for inverse-CDF sampling.
pub const CDF_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPosterior {
    densities: Vec<Polynomial>,
}

impl ParameterPosterior {
    pub fn uniform(bounds: &[Bounds]) -> Self {
        let densities = bounds
            .iter()
            .map(|b| Polynomial::constant(1.0 / b.width(), *b))
            .collect();
        Self { densities }
    }

    pub fn from_densities(densities: Vec<Polynomial>) -> Self {
        Self { densities }
    }

    pub fn densities(&self) -> &[Polynomial] {
        &self.densities
    }

    /// Conjugate-style update with one fitted likelihood per parameter.
    pub fn update(&self, likelihood_fits: &[Polynomial]) -> Self {
        assert_eq!(likelihood_fits.len(), self.densities.len());
        let densities = self
            .densities
            .iter()
            .zip(likelihood_fits)
            .map(|(prior, fhat)| update_density(prior, fhat))
            .collect();
        Self { densities }
    }

    /// Mean of [`ESTIMATE_SAMPLES`] draws from each normalised `|density|`.
    pub fn estimate<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        let bounds: Vec<Bounds> = self.densities.iter().map(|d| d.domain()).collect();
        let values = self
            .densities
            .iter()
            .map(|d| {
                let sampler = InverseCdf::new(|x| d.eval(x).abs(), d.domain(), CDF_POINTS);
                let sum: f64 = (0..ESTIMATE_SAMPLES).map(|_| sampler.sample(rng)).sum();
                sum / ESTIMATE_SAMPLES as f64
            })
            .collect();
        ParameterVector::clamped(values, bounds)
    }
}

fn update_density(prior: &Polynomial, fhat: &Polynomial) -> Polynomial {
    let dom = prior.domain();
    let product = fhat.mul(prior);
    let samples: Vec<(f64, f64)> = dom
        .grid(PROFILE_POINTS)
        .into_iter()
        .map(|x| (x, product.eval(x).max(PRODUCT_FLOOR)))
        .collect();
    let refit = Polynomial::fit(&samples, FIT_DEGREE, dom).expect("grid points are distinct");
    let mass = refit.abs_integral();
    if mass > 0.0 && mass.is_finite() {
        refit.scale(1.0 / mass)
    } else {
        Polynomial::constant(1.0 / dom.width(), dom)
    }
}

/// One ABU step: fit profiles around `p_prev`, update the densities, and draw
/// a new point estimate from them.
pub fn abu_update<L: Likelihood + ?Sized, R: Rng + ?Sized>(
    posterior: &ParameterPosterior,
    f: &L,
    p_prev: &ParameterVector,
    rng: &mut R,
) -> (ParameterPosterior, ParameterVector) {
    let fits = fit_profiles(f, p_prev);
    let next = posterior.update(&fits);
    let estimate = next.estimate(rng);
    (next, estimate)
}

/// Piecewise-linear inverse CDF of an unnormalised density on a fixed grid.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    xs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl InverseCdf {
    pub fn new(density: impl Fn(f64) -> f64, domain: Bounds, points: usize) -> Self {
        let xs = domain.grid(points.max(2));
        let ys: Vec<f64> = xs.iter().map(|&x| density(x).max(0.0)).collect();
        let mut cumulative = Vec::with_capacity(xs.len());
        cumulative.push(0.0);
        for i in 1..xs.len() {
            let area = 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
            cumulative.push(cumulative[i - 1] + area);
        }
        Self { xs, cumulative }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Maps `u` in `[0, 1]` to the domain.
    pub fn quantile(&self, u: f64) -> f64 {
        let total = self.total();
        if !(total > 0.0) {
            // flat fallback
            let (a, b) = (self.xs[0], *self.xs.last().unwrap());
            return a + u * (b - a);
        }
        let target = u.clamp(0.0, 1.0) * total;
        let i = self
            .cumulative
            .partition_point(|&c| c < target)
            .clamp(1, self.xs.len() - 1);
        let (c0, c1) = (self.cumulative[i - 1], self.cumulative[i]);
        let t = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit() -> Bounds {
        Bounds::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn uniform_times_constant_stays_uniform() {
        let b = Bounds::new(0.1, 1.0).unwrap();
        let post = ParameterPosterior::uniform(&[b]);
        let flat = Polynomial::constant(0.3, b);
        let next = post.update(&[flat]);
        let d = &next.densities()[0];
        for x in b.grid(11) {
            assert!((d.eval(x) - 1.0 / 0.9).abs() < 1e-9);
        }
    }

    #[test]
    fn normalised_to_unit_absolute_mass() {
        let post = ParameterPosterior::uniform(&[unit()]);
        // likelihood with a negative dip between samples
        let wiggle = Polynomial::new(vec![0.9, -8.0, 20.0, -13.0, 0.3], unit());
        let next = post.update(&[wiggle]);
        assert!((next.densities()[0].abs_integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn successive_updates_match_product_oracle() {
        let l1 = |x: f64| 1.0 + 0.5 * x;
        let l2 = |x: f64| 2.0 - x;
        let dom = unit();
        let fit = |f: &dyn Fn(f64) -> f64| {
            let s: Vec<(f64, f64)> = dom.grid(5).into_iter().map(|x| (x, f(x))).collect();
            Polynomial::fit(&s, 4, dom).unwrap()
        };
        let post = ParameterPosterior::uniform(&[dom])
            .update(&[fit(&l1)])
            .update(&[fit(&l2)]);
        // dense-grid oracle: normalised product of the two likelihoods
        let n = 100_000;
        let mass: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                l1(x) * l2(x) / n as f64
            })
            .sum();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            let oracle = l1(x) * l2(x) / mass;
            assert!((post.densities()[0].eval(x) - oracle).abs() < 1e-3);
        }
    }

    #[test]
    fn inverse_cdf_of_linear_density() {
        // density 2x on [0, 1] has quantile sqrt(u)
        let s = InverseCdf::new(|x| 2.0 * x, unit(), CDF_POINTS);
        for u in [0.01, 0.25, 0.5, 0.81, 0.99] {
            assert!((s.quantile(u) - f64::sqrt(u)).abs() < 1e-3);
        }
    }

    #[test]
    fn estimates_concentrate_near_peak() {
        let dom = unit();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = |p: &ParameterVector| 0.05 + 0.9 * (-(p.get(0) - 0.2).powi(2) * 20.0).exp();
        let mut post = ParameterPosterior::uniform(&[dom]);
        let mut p = ParameterVector::new(vec![0.8], vec![dom]).unwrap();
        for _ in 0..15 {
            let (n, q) = abu_update(&post, &f, &p, &mut rng);
            post = n;
            p = q;
        }
        let grid = dom.grid(5);
        let mode = grid
            .iter()
            .copied()
            .max_by(|a, b| post.densities()[0].eval(*a).total_cmp(&post.densities()[0].eval(*b)))
            .unwrap();
        assert_eq!(mode, 0.25);
        assert!(p.get(0) < 0.5, "{p:?}");
    }

    fn likelihood_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-12f64..1.0, 5)
    }

    proptest! {
        #[test]
        fn repeated_updates_stay_normalised_and_in_bounds(
            ls in prop::collection::vec(likelihood_values(), 1..12),
            seed in 0u64..10_000,
        ) {
            let dom = Bounds::new(0.1, 1.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut post = ParameterPosterior::uniform(&[dom]);
            for l in ls {
                let s: Vec<(f64, f64)> = dom.grid(5).into_iter().zip(l).collect();
                let fhat = Polynomial::fit(&s, 4, dom).unwrap();
                post = post.update(&[fhat]);
                prop_assert!((post.densities()[0].abs_integral() - 1.0).abs() < 1e-6);
                let e = post.estimate(&mut rng);
                prop_assert!(dom.contains(e.get(0)));
            }
        }
    }
}
