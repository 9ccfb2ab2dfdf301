//! Approximate gradient ascent.

use super::{fit_profiles, Likelihood, Polynomial};
use crate::model::ParameterVector;

/// Backtracking line search settings: contraction factor and sufficient
/// increase constant.
pub const CONTRACTION: f64 = 0.5;
pub const ARMIJO: f64 = 0.5;
pub const INITIAL_STEP: f64 = 1.0;
pub const MAX_HALVINGS: usize = 20;

/// One gradient step on the fitted polynomial `fhat` from `x`, with
/// backtracking on `fhat` itself. The candidate is projected onto the domain
/// and must satisfy `fhat(x') >= fhat(x) + c * g * (x' - x)`.
pub fn ascend_polynomial(fhat: &Polynomial, x: f64) -> f64 {
    let dom = fhat.domain();
    let grad = fhat.derivative().eval(x);
    if grad == 0.0 || !grad.is_finite() {
        return x;
    }
    let fx = fhat.eval(x);
    let mut step = INITIAL_STEP;
    for _ in 0..=MAX_HALVINGS {
        let cand = dom.clamp(x + step * grad);
        if cand == x {
            return x;
        }
        if fhat.eval(cand) >= fx + ARMIJO * grad * (cand - x) {
            return cand;
        }
        step *= CONTRACTION;
    }
    x
}

/// Updates every coordinate from its own likelihood profile (others pinned
/// at `p_prev`), simultaneously.
pub fn aga_update<L: Likelihood + ?Sized>(f: &L, p_prev: &ParameterVector) -> ParameterVector {
    let fits = fit_profiles(f, p_prev);
    let values = fits
        .iter()
        .zip(p_prev.values())
        .map(|(fhat, &x)| ascend_polynomial(fhat, x))
        .collect();
    ParameterVector::clamped(values, p_prev.bounds().to_vec())
}
