//! Fraction-to-boundary rule and the simplified filter line search.

use super::{barrier_value_grad, Iterate, StandardForm};

/// Largest primal and dual steps keeping every bounded component at
/// least (1 − τ) of its current distance from its bound, and every
/// multiplier at least (1 − τ) of its current value.
pub fn fraction_to_boundary(
    form: &StandardForm,
    it: &Iterate,
    dw: &[f64],
    dzl: &[f64],
    dzu: &[f64],
    tau: f64,
) -> (f64, f64) {
    let mut alpha_p = 1.0f64;
    let mut alpha_d = 1.0f64;
    for i in 0..form.n_aug {
        if form.lo[i].is_finite() {
            if dw[i] < 0.0 {
                alpha_p = alpha_p.min(tau * (it.w[i] - form.lo[i]) / -dw[i]);
            }
            if dzl[i] < 0.0 {
                alpha_d = alpha_d.min(tau * it.zl[i] / -dzl[i]);
            }
        }
        if form.hi[i].is_finite() {
            if dw[i] > 0.0 {
                alpha_p = alpha_p.min(tau * (form.hi[i] - it.w[i]) / dw[i]);
            }
            if dzu[i] < 0.0 {
                alpha_d = alpha_d.min(tau * it.zu[i] / -dzu[i]);
            }
        }
    }
    (alpha_p, alpha_d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSearchOutcome {
    Accepted { alpha: f64, theta: f64, phi: f64 },
    Failed,
}

const GAMMA_THETA: f64 = 1e-5;
const ETA_ARMIJO: f64 = 1e-4;
/// Armijo-type acceptance is only offered from near-feasible iterates;
/// elsewhere every step must reduce the violation, which prevents the
/// search from trading feasibility for barrier descent indefinitely.
const THETA_MIN: f64 = 1e-4;
/// Hard infeasibility envelope for Armijo-type steps. Near-feasible
/// iterates must be allowed a transient O(1) violation — with curved
/// constraints any productive step leaves the manifold — so the cap sits
/// far above the tolerance.
const THETA_CEILING: f64 = 1e4;
const MAX_BACKTRACKS: usize = 30;

/// Backtracks α = alpha_max·2^{-j}. A trial point is accepted when it is
/// not dominated by a remembered (θ, φ) pair and either improves the
/// constraint violation by a relative margin or, from a near-feasible
/// iterate, satisfies an Armijo decrease of φ_μ inside the violation
/// envelope.
pub fn line_search(
    form: &StandardForm,
    it: &Iterate,
    dw: &[f64],
    alpha_max: f64,
    filter: &[(f64, f64)],
) -> LineSearchOutcome {
    let theta0 = form.theta(&it.w);
    let (phi0, grad) = barrier_value_grad(form, it);
    let dphi: f64 = grad.iter().zip(dw).map(|(g, d)| g * d).sum();
    let f_type = theta0 <= THETA_MIN;

    let mut alpha = alpha_max;
    let mut trial = it.clone();
    for _ in 0..=MAX_BACKTRACKS {
        for i in 0..form.n_aug {
            trial.w[i] = it.w[i] + alpha * dw[i];
        }
        let theta_t = form.theta(&trial.w);
        let (phi_t, _) = barrier_value_grad(form, &trial);
        let dominated = filter.iter().any(|&(ft, fp)| theta_t >= ft && phi_t >= fp);
        if !dominated {
            let theta_improves = theta0 > 0.0 && theta_t <= (1.0 - GAMMA_THETA) * theta0;
            let armijo = f_type
                && phi_t <= phi0 + ETA_ARMIJO * alpha * dphi
                && theta_t <= THETA_CEILING;
            if theta_improves || armijo {
                return LineSearchOutcome::Accepted { alpha, theta: theta_t, phi: phi_t };
            }
        }
        alpha *= 0.5;
    }
    LineSearchOutcome::Failed
}
