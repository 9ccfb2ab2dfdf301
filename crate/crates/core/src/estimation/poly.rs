//! Univariate polynomials on a bounded domain, in the monomial basis.

use nalgebra::{DMatrix, DVector};

use super::EstimationError;
use crate::model::Bounds;

/// Degree used for every likelihood and density fit.
pub const FIT_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    /// `coeffs[i]` multiplies `x^i`.
    coeffs: Vec<f64>,
    domain: Bounds,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>, domain: Bounds) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { coeffs, domain }
    }

    pub fn constant(c: f64, domain: Bounds) -> Self {
        Self::new(vec![c], domain)
    }

    /// Least-squares fit of the given degree. Needs at least `degree + 1`
    /// distinct abscissae; with exactly that many the fit interpolates.
    pub fn fit(samples: &[(f64, f64)], degree: usize, domain: Bounds) -> Result<Self, EstimationError> {
        let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() < degree + 1 {
            return Err(EstimationError::TooFewSamples {
                needed: degree + 1,
                got: xs.len(),
            });
        }
        let n = samples.len();
        let vander = DMatrix::from_fn(n, degree + 1, |i, j| samples[i].0.powi(j as i32));
        let rhs = DVector::from_iterator(n, samples.iter().map(|s| s.1));
        let coeffs = if n == degree + 1 {
            vander
                .lu()
                .solve(&rhs)
                .ok_or(EstimationError::Singular)?
        } else {
            vander
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|_| EstimationError::Singular)?
        };
        Ok(Self::new(coeffs.iter().copied().collect(), domain))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn domain(&self) -> Bounds {
        self.domain
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self::new(coeffs, self.domain)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Self::new(coeffs, self.domain)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs, self.domain)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect(), self.domain)
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// Real roots inside `[a, b]`, ascending. Roots are isolated between the
    /// critical points, found recursively from the derivative, and refined by
    /// bisection.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        let deg = self.degree();
        if deg == 0 {
            return Vec::new();
        }
        if deg == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if r > a && r < b { vec![r] } else { Vec::new() };
        }
        let mut breaks = vec![a];
        breaks.extend(self.derivative().roots_in(a, b));
        breaks.push(b);
        let mut roots = Vec::new();
        for w in breaks.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (mut flo, fhi) = (self.eval(lo), self.eval(hi));
            if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = self.eval(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        roots
    }

    /// Integral of `|p|` over the whole domain.
    pub fn abs_integral(&self) -> f64 {
        let (a, b) = (self.domain.min, self.domain.max);
        let mut pts = vec![a];
        pts.extend(self.roots_in(a, b));
        pts.push(b);
        pts.windows(2).map(|w| self.integral(w[0], w[1]).abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> Bounds {
        Bounds::new(0.0, 1.0).unwrap()
    }

    fn samples(f: impl Fn(f64) -> f64, dom: Bounds) -> Vec<(f64, f64)> {
        dom.grid(5).into_iter().map(|x| (x, f(x))).collect()
    }

    #[test]
    fn recovers_square() {
        let p = Polynomial::fit(&samples(|x| x * x, unit()), 4, unit()).unwrap();
        assert_eq!(p.coeffs().len(), 5);
        for (c, w) in p.coeffs().iter().zip([0.0, 0.0, 1.0, 0.0, 0.0]) {
            assert!((c - w).abs() < 1e-9, "{:?}", p.coeffs());
        }
    }

    #[test]
    fn recovers_constant() {
        let dom = Bounds::new(0.1, 1.0).unwrap();
        let p = Polynomial::fit(&samples(|_| 0.3, dom), 4, dom).unwrap();
        assert!((p.coeffs()[0] - 0.3).abs() < 1e-9);
        assert!(p.coeffs()[1..].iter().all(|c| c.abs() < 1e-9));
    }

    #[test]
    fn recovers_quartic_on_dense_grid() {
        let f = |x: f64| 2.0 * x.powi(4) - x;
        let p = Polynomial::fit(&samples(f, unit()), 4, unit()).unwrap();
        for (c, w) in p.coeffs().iter().zip([0.0, -1.0, 0.0, 0.0, 2.0]) {
            assert!((c - w).abs() < 1e-9);
        }
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!((p.eval(x) - f(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_distinct_points() {
        let s = vec![(0.0, 1.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0)];
        assert!(matches!(
            Polynomial::fit(&s, 4, unit()),
            Err(EstimationError::TooFewSamples { needed: 5, got: 3 })
        ));
    }

    #[test]
    fn overdetermined_fit_is_least_squares() {
        let s: Vec<(f64, f64)> = (0..21).map(|i| (i as f64 / 20.0, 1.0 + 0.5 * i as f64 / 20.0)).collect();
        let p = Polynomial::fit(&s, 4, unit()).unwrap();
        assert!((p.eval(0.37) - 1.185).abs() < 1e-9);
    }

    #[test]
    fn abs_integral_counts_negative_area() {
        // x - 0.5 on [0, 1]: two triangles of area 1/8
        let p = Polynomial::new(vec![-0.5, 1.0], unit());
        assert!((p.abs_integral() - 0.25).abs() < 1e-12);
        assert!(p.integral(0.0, 1.0).abs() < 1e-12);
        // (x - 0.2)(x - 0.7) has roots inside the domain
        let q = Polynomial::new(vec![0.14, -0.9, 1.0], unit());
        let dense: f64 = (0..200_000)
            .map(|i| q.eval((i as f64 + 0.5) / 200_000.0).abs() / 200_000.0)
            .sum();
        assert!((q.abs_integral() - dense).abs() < 1e-8);
    }

    #[test]
    fn roots_found() {
        let p = Polynomial::new(vec![0.0, 0.0, 0.0], unit());
        assert!(p.roots_in(0.0, 1.0).is_empty());
        // (x-0.1)(x-0.4)(x-0.8)
        let q = Polynomial::new(vec![-0.032, 0.44, -1.3, 1.0], unit());
        let r = q.roots_in(0.0, 1.0);
        assert_eq!(r.len(), 3);
        for (x, w) in r.iter().zip([0.1, 0.4, 0.8]) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn product_degree() {
        let a = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0, 1.0], unit());
        let b = Polynomial::new(vec![0.5, 0.0, 0.0, 0.0, 3.0], unit());
        let c = a.mul(&b);
        assert_eq!(c.degree(), 8);
        for x in [0.0, 0.3, 0.9] {
            assert!((c.eval(x) - a.eval(x) * b.eval(x)).abs() < 1e-12);
        }
    }

    fn quartic() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 5)
    }

    proptest! {
        #[test]
        fn five_points_interpolate_any_quartic(c in quartic(), lo in -1.0f64..0.5, w in 0.2f64..2.0) {
            let dom = Bounds::new(lo, lo + w).unwrap();
            let gen = Polynomial::new(c, dom);
            let s = samples(|x| gen.eval(x), dom);
            let fit = Polynomial::fit(&s, 4, dom).unwrap();
            for (x, y) in &s {
                prop_assert!((fit.eval(*x) - y).abs() < 1e-9);
            }
        }

        #[test]
        fn derivative_matches_central_differences(c in quartic()) {
            let p = Polynomial::new(c, unit());
            let d = p.derivative();
            let h = 1e-5;
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
                prop_assert!((d.eval(x) - fd).abs() < 1e-6);
            }
        }

        #[test]
        fn integral_matches_antiderivative(c in quartic(), a in 0.0f64..0.5, b in 0.5f64..1.0) {
            let p = Polynomial::new(c, unit());
            let n = 20_000;
            let h = (b - a) / n as f64;
            let mid: f64 = (0..n).map(|i| p.eval(a + (i as f64 + 0.5) * h) * h).sum();
            prop_assert!((p.integral(a, b) - mid).abs() < 1e-7);
        }
    }
}
