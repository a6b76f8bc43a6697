//! Barrier function evaluation and the scaled KKT error measure.

use super::{Iterate, StandardForm};

/// φ_μ(w) = f(x) − μ Σ ln(distance to each finite bound), with gradient.
/// Panics on interiority violation; callers maintain strict interiority.
pub fn barrier_value_grad(form: &StandardForm, it: &Iterate) -> (f64, Vec<f64>) {
    let n_aug = form.n_aug;
    let mut grad = vec![0.0; n_aug];
    form.gradient(&it.w, &mut grad);
    let mut phi = form.objective(&it.w);
    for i in 0..n_aug {
        if form.lo[i].is_finite() {
            let d = it.w[i] - form.lo[i];
            assert!(d > 0.0, "iterate left the interior at component {i}");
            phi -= it.mu * d.ln();
            grad[i] -= it.mu / d;
        }
        if form.hi[i].is_finite() {
            let d = form.hi[i] - it.w[i];
            assert!(d > 0.0, "iterate left the interior at component {i}");
            phi -= it.mu * d.ln();
            grad[i] += it.mu / d;
        }
    }
    (phi, grad)
}

/// Scaled optimality error E_μ: the max of the stationarity, feasibility,
/// and complementarity residual norms of the barrier first-order
/// conditions. With μ = 0 this is the termination measure.
pub fn kkt_error(form: &StandardForm, it: &Iterate, mu: f64) -> f64 {
    let n_aug = form.n_aug;
    let m = form.m;

    // Stationarity: ∇f + Jᵀy − zl + zu.
    let mut r = vec![0.0; n_aug];
    form.gradient(&it.w, &mut r);
    form.jac_t_mul(&it.w, &it.y, &mut r);
    let mut n_bounds = 0usize;
    for i in 0..n_aug {
        r[i] -= it.zl[i];
        r[i] += it.zu[i];
        if form.lo[i].is_finite() {
            n_bounds += 1;
        }
        if form.hi[i].is_finite() {
            n_bounds += 1;
        }
    }
    let stat = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    // Feasibility: ‖c(w)‖∞.
    let mut c = vec![0.0; m];
    form.constraints(&it.w, &mut c);
    let feas = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    // Complementarity: |dist·z − μ| per finite bound.
    let mut comp = 0.0f64;
    for i in 0..n_aug {
        if form.lo[i].is_finite() {
            comp = comp.max(((it.w[i] - form.lo[i]) * it.zl[i] - mu).abs());
        }
        if form.hi[i].is_finite() {
            comp = comp.max(((form.hi[i] - it.w[i]) * it.zu[i] - mu).abs());
        }
    }

    // Multiplier-magnitude scaling, capped at 100.
    let s_max = 100.0;
    let dual_sum: f64 = it.y.iter().map(|v| v.abs()).sum::<f64>()
        + it.zl.iter().map(|v| v.abs()).sum::<f64>()
        + it.zu.iter().map(|v| v.abs()).sum::<f64>();
    let denom = (m + n_bounds).max(1) as f64;
    let s_d = (dual_sum / denom).max(s_max) / s_max;
    let z_sum: f64 = it.zl.iter().map(|v| v.abs()).sum::<f64>()
        + it.zu.iter().map(|v| v.abs()).sum::<f64>();
    let s_c = (z_sum / n_bounds.max(1) as f64).max(s_max) / s_max;

    (stat / s_d).max(feas).max(comp / s_c)
}
