//! The outer interior-point driver: initialization, the barrier loop,
//! second-order correction, and termination bookkeeping.

use super::{
    assemble_kkt, barrier_value_grad, fraction_to_boundary, kkt_error, line_search, mu_update,
    recover_dz, DeltaSchedule, Iterate, LineSearchOutcome, NlpProblem, SolveResult, SolveStatus,
    SolverOptions, StandardForm, Timing,
};
use crate::ldl::{Inertia, KktBackend, LdlError};
use std::cell::Cell;
use std::time::Instant;

/// Inner-loop exit: the barrier subproblem counts as solved when
/// E_μ ≤ κ_ε·μ.
const KAPPA_EPSILON: f64 = 10.0;
/// Relative margin used to push the initial point off its bounds.
const INIT_MARGIN: f64 = 1e-2;

/// Wraps a backend to attribute factorize/solve wall time.
struct TimedBackend<'a> {
    inner: &'a mut dyn KktBackend,
    seconds: Cell<f64>,
}

impl<'a> KktBackend for TimedBackend<'a> {
    fn id(&self) -> &'static str {
        self.inner.id()
    }
    fn factorize(&mut self, a: &crate::sparse::SymCsc) -> Result<(), LdlError> {
        let t = Instant::now();
        let r = self.inner.factorize(a);
        self.seconds.set(self.seconds.get() + t.elapsed().as_secs_f64());
        r
    }
    fn inertia(&self) -> Option<Inertia> {
        self.inner.inertia()
    }
    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LdlError> {
        let t = Instant::now();
        let r = self.inner.solve(b);
        self.seconds.set(self.seconds.get() + t.elapsed().as_secs_f64());
        r
    }
    fn delayed_pivots(&self) -> usize {
        self.inner.delayed_pivots()
    }
}

/// Clips v into (lo, hi) with a margin of min(0.01·max(1,|bound|),
/// 0.01·width) on each finite side.
fn clip_interior(v: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    let mut out = v;
    if lo.is_finite() {
        let m = (INIT_MARGIN * lo.abs().max(1.0)).min(if width.is_finite() {
            INIT_MARGIN * width
        } else {
            f64::INFINITY
        });
        out = out.max(lo + m);
    }
    if hi.is_finite() {
        let m = (INIT_MARGIN * hi.abs().max(1.0)).min(if width.is_finite() {
            INIT_MARGIN * width
        } else {
            f64::INFINITY
        });
        out = out.min(hi - m);
    }
    out
}

/// Runs the interior-point method on `p` over the given linear-solver
/// backend. No panics escape for well-formed problems; failures surface
/// as statuses.
pub fn solve(p: &dyn NlpProblem, backend: &mut dyn KktBackend, opts: &SolverOptions) -> SolveResult {
    let start = Instant::now();
    let x0 = p.initial_point();
    let form = match StandardForm::new(p) {
        Ok(f) => f,
        Err(status) => {
            return SolveResult {
                status,
                objective: p.objective(&x0),
                x: x0,
                iterations: 0,
                kkt_error: f64::INFINITY,
                timing: Timing { total_seconds: start.elapsed().as_secs_f64(), ..Default::default() },
                inertia_corrections: 0,
                corrected_iterations: 0,
                delta_w_last: 0.0,
            };
        }
    };
    let backend = &mut TimedBackend { inner: backend, seconds: Cell::new(0.0) };
    let mut eval_seconds = 0.0f64;

    // Initial point: user x₀ pushed inside its bounds, slacks from g(x₀)
    // likewise, multipliers from μ₀ and the bound distances.
    let n_aug = form.n_aug;
    let mut w = vec![0.0; n_aug];
    for i in 0..form.n {
        w[i] = clip_interior(x0[i], form.lo[i], form.hi[i]);
    }
    {
        let t = Instant::now();
        let mut g = vec![0.0; form.m];
        p.constraints(&w[..form.n], &mut g);
        eval_seconds += t.elapsed().as_secs_f64();
        for (row, s) in form.slack_of_row.iter().enumerate() {
            if let Some(s) = s {
                w[*s] = clip_interior(g[row], form.lo[*s], form.hi[*s]);
            }
        }
    }
    let mut zl = vec![0.0; n_aug];
    let mut zu = vec![0.0; n_aug];
    for i in 0..n_aug {
        if form.lo[i].is_finite() {
            zl[i] = opts.mu0 / (w[i] - form.lo[i]);
        }
        if form.hi[i].is_finite() {
            zu[i] = opts.mu0 / (form.hi[i] - w[i]);
        }
    }
    let mut it = Iterate { w, y: vec![0.0; form.m], zl, zu, mu: opts.mu0 };

    let mut sched = DeltaSchedule::new(opts);
    let mut filter: Vec<(f64, f64)> = Vec::new();
    let mut iterations = 0usize;
    let mut corrected_iterations = 0usize;
    let mu_floor = opts.tol / 10.0;

    let finish = |status: SolveStatus,
                  it: &Iterate,
                  iterations: usize,
                  e0: f64,
                  sched: &DeltaSchedule,
                  eval_seconds: f64,
                  linear_seconds: f64,
                  corrected_iterations: usize| {
        SolveResult {
            status,
            x: it.w[..form.n].to_vec(),
            iterations,
            objective: form.objective(&it.w),
            kkt_error: e0,
            timing: Timing {
                eval_seconds,
                linear_seconds,
                total_seconds: start.elapsed().as_secs_f64(),
            },
            inertia_corrections: sched.total_corrections,
            corrected_iterations,
            delta_w_last: sched.delta_w_last,
        }
    };

    loop {
        let t = Instant::now();
        let e0 = kkt_error(&form, &it, 0.0);
        let e_mu = kkt_error(&form, &it, it.mu);
        eval_seconds += t.elapsed().as_secs_f64();

        if e0 <= opts.tol {
            return finish(
                SolveStatus::Optimal,
                &it,
                iterations,
                e0,
                &sched,
                eval_seconds,
                backend.seconds.get(),
                corrected_iterations,
            );
        }
        let over_limit = if iterations >= opts.max_iter {
            Some(SolveStatus::IterationLimit)
        } else if start.elapsed().as_secs_f64() > opts.time_limit {
            Some(SolveStatus::TimeLimit)
        } else {
            None
        };
        if let Some(limit) = over_limit {
            let status =
                if e0 <= opts.acceptable_tol { SolveStatus::Acceptable } else { limit };
            return finish(
                status,
                &it,
                iterations,
                e0,
                &sched,
                eval_seconds,
                backend.seconds.get(),
                corrected_iterations,
            );
        }

        // Barrier subproblem solved to its tolerance: tighten μ.
        if e_mu <= KAPPA_EPSILON * it.mu && it.mu > mu_floor {
            it.mu = mu_update(it.mu, opts);
            filter.clear();
            continue;
        }

        // Assembly time counts as evaluation; backend time inside the
        // closure is attributed separately by TimedBackend.
        let t = Instant::now();
        let pre_linear = backend.seconds.get();
        let step = sched.corrected_step(backend, it.mu, |dw, dc| assemble_kkt(&form, &it, dw, dc));
        eval_seconds += (t.elapsed().as_secs_f64() - (backend.seconds.get() - pre_linear)).max(0.0);
        let step = match step {
            Ok(s) => s,
            Err(status) => {
                return finish(
                    status,
                    &it,
                    iterations,
                    e0,
                    &sched,
                    eval_seconds,
                    backend.seconds.get(),
                    corrected_iterations,
                );
            }
        };

        let step_corrections = step.corrections;
        let tau = opts.tau_min.max(1.0 - it.mu);
        let (dzl, dzu) = recover_dz(&form, &it, &step.dw);
        let (alpha_p, alpha_d) = fraction_to_boundary(&form, &it, &step.dw, &dzl, &dzu, tau);

        let mut accepted = line_search(&form, &it, &step.dw, alpha_p, &filter);
        let mut dw = step.dw;
        let mut dy = step.dy;
        let (mut dzl, mut dzu) = (dzl, dzu);
        let mut alpha_d = alpha_d;

        if accepted == LineSearchOutcome::Failed && form.m > 0 {
            // One second-order correction: re-solve with the constraint
            // rhs block c(w + Δw) + c(w) against the same factorization.
            let t = Instant::now();
            let mut c_soc = vec![0.0; form.m];
            let mut c_now = vec![0.0; form.m];
            let wt: Vec<f64> = it.w.iter().zip(&dw).map(|(a, b)| a + b).collect();
            form.constraints(&wt, &mut c_soc);
            form.constraints(&it.w, &mut c_now);
            let (_, grad_phi) = barrier_value_grad(&form, &it);
            let mut top = grad_phi;
            form.jac_t_mul(&it.w, &it.y, &mut top);
            eval_seconds += t.elapsed().as_secs_f64();
            let mut rhs = vec![0.0; n_aug + form.m];
            for i in 0..n_aug {
                rhs[i] = -top[i];
            }
            for j in 0..form.m {
                rhs[n_aug + j] = -(c_soc[j] + c_now[j]);
            }
            if let Ok(sol) = backend.solve(&rhs) {
                dy = sol[n_aug..].to_vec();
                dw = sol[..n_aug].to_vec();
                let z = recover_dz(&form, &it, &dw);
                dzl = z.0;
                dzu = z.1;
                let fb = fraction_to_boundary(&form, &it, &dw, &dzl, &dzu, tau);
                alpha_d = fb.1;
                accepted = line_search(&form, &it, &dw, fb.0, &filter);
            }
        }

        let (alpha, theta_acc, phi_acc) = match accepted {
            LineSearchOutcome::Accepted { alpha, theta, phi } => (alpha, theta, phi),
            LineSearchOutcome::Failed => {
                return finish(
                    SolveStatus::Diverged,
                    &it,
                    iterations,
                    e0,
                    &sched,
                    eval_seconds,
                    backend.seconds.get(),
                    corrected_iterations,
                );
            }
        };

        for i in 0..n_aug {
            it.w[i] += alpha * dw[i];
        }
        for j in 0..form.m {
            it.y[j] += alpha * dy[j];
        }
        for i in 0..n_aug {
            it.zl[i] += alpha_d * dzl[i];
            it.zu[i] += alpha_d * dzu[i];
        }
        debug_assert!(interior(&form, &it), "accepted iterate must stay interior");

        if std::env::var_os("BARRIEROPT_TRACE").is_some() {
            eprintln!(
                "it={iterations} mu={:.2e} e0={:.2e} emu={:.2e} alpha={alpha:.2e} ad={alpha_d:.2e} theta={theta_acc:.2e} phi={phi_acc:.4e} dw={:.1e} delayed={}",
                it.mu, e0, e_mu, sched.delta_w_last, backend.delayed_pivots()
            );
        }
        if step_corrections > 0 {
            corrected_iterations += 1;
        }
        filter.push((theta_acc, phi_acc));
        if filter.len() > 2 {
            filter.remove(0);
        }
        iterations += 1;
    }
}

fn interior(form: &StandardForm, it: &Iterate) -> bool {
    (0..form.n_aug).all(|i| {
        (!form.lo[i].is_finite() || (it.w[i] > form.lo[i] && it.zl[i] > 0.0))
            && (!form.hi[i].is_finite() || (it.w[i] < form.hi[i] && it.zu[i] > 0.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldl::{DenseBackend, PivotOptions, SparseBackend};

    struct Simple {
        n: usize,
        m: usize,
        xl: Vec<f64>,
        xu: Vec<f64>,
        gl: Vec<f64>,
        gu: Vec<f64>,
        x0: Vec<f64>,
        kind: u8,
    }

    impl NlpProblem for Simple {
        fn num_vars(&self) -> usize {
            self.n
        }
        fn num_cons(&self) -> usize {
            self.m
        }
        fn var_bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (self.xl.clone(), self.xu.clone())
        }
        fn con_bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (self.gl.clone(), self.gu.clone())
        }
        fn initial_point(&self) -> Vec<f64> {
            self.x0.clone()
        }
        fn objective(&self, x: &[f64]) -> f64 {
            match self.kind {
                0 => x[0],
                1 => 0.5 * (x[0] - 2.0) * (x[0] - 2.0),
                _ => x[0] + x[1],
            }
        }
        fn gradient(&self, x: &[f64], g: &mut [f64]) {
            match self.kind {
                0 => g[0] = 1.0,
                1 => g[0] = x[0] - 2.0,
                _ => g.fill(1.0),
            }
        }
        fn constraints(&self, x: &[f64], c: &mut [f64]) {
            if self.kind == 2 {
                c[0] = x[0] * x[1];
            }
        }
        fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
            if self.kind == 2 { vec![(0, 0), (0, 1)] } else { vec![] }
        }
        fn jacobian_values(&self, x: &[f64], v: &mut [f64]) {
            if self.kind == 2 {
                v[0] = x[1];
                v[1] = x[0];
            }
        }
        fn hessian_pattern(&self) -> Vec<(usize, usize)> {
            match self.kind {
                1 => vec![(0, 0)],
                2 => vec![(1, 0)],
                _ => vec![],
            }
        }
        fn hessian_values(&self, _x: &[f64], y: &[f64], v: &mut [f64]) {
            match self.kind {
                1 => v[0] = 1.0,
                2 => v[0] = y[0],
                _ => {}
            }
        }
    }

    fn active_bound() -> Simple {
        Simple {
            n: 1,
            m: 0,
            xl: vec![1.0],
            xu: vec![f64::INFINITY],
            gl: vec![],
            gu: vec![],
            x0: vec![5.0],
            kind: 0,
        }
    }

    fn interior_quadratic() -> Simple {
        Simple {
            n: 1,
            m: 0,
            xl: vec![0.0],
            xu: vec![10.0],
            gl: vec![],
            gu: vec![],
            x0: vec![5.0],
            kind: 1,
        }
    }

    fn hyperbola() -> Simple {
        Simple {
            n: 2,
            m: 1,
            xl: vec![0.0, 0.0],
            xu: vec![f64::INFINITY, f64::INFINITY],
            gl: vec![1.0],
            gu: vec![1.0],
            x0: vec![0.5, 2.0],
            kind: 2,
        }
    }

    #[test]
    fn active_lower_bound() {
        let p = active_bound();
        let mut b = SparseBackend::new(PivotOptions::default(), 1);
        let r = solve(&p, &mut b, &SolverOptions::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-6, "objective {}", r.objective);
        assert!((r.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn interior_optimum() {
        let p = interior_quadratic();
        let mut b = SparseBackend::new(PivotOptions::default(), 1);
        let r = solve(&p, &mut b, &SolverOptions::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.objective.abs() < 1e-8, "objective {}", r.objective);
        assert!((r.x[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn equality_constrained_hyperbola() {
        // min x1+x2 s.t. x1·x2 = 1, x ≥ 0: optimum (1,1), objective 2.
        let p = hyperbola();
        let mut b = SparseBackend::new(PivotOptions::default(), 1);
        let r = solve(&p, &mut b, &SolverOptions::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 2.0).abs() < 1e-6, "objective {}", r.objective);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn dense_backend_agrees() {
        for p in [active_bound(), interior_quadratic(), hyperbola()] {
            let mut sp = SparseBackend::new(PivotOptions::default(), 1);
            let mut dn = DenseBackend::new(PivotOptions::default(), 2000);
            let rs = solve(&p, &mut sp, &SolverOptions::default());
            let rd = solve(&p, &mut dn, &SolverOptions::default());
            assert_eq!(rs.status, SolveStatus::Optimal);
            assert_eq!(rd.status, SolveStatus::Optimal);
            assert!((rs.objective - rd.objective).abs() < 1e-6);
        }
    }

    #[test]
    fn degrees_of_freedom_error_surfaces() {
        let p = Simple {
            n: 1,
            m: 2,
            xl: vec![f64::NEG_INFINITY],
            xu: vec![f64::INFINITY],
            gl: vec![0.0, 1.0],
            gu: vec![0.0, 1.0],
            x0: vec![0.0],
            kind: 0,
        };
        let mut b = SparseBackend::new(PivotOptions::default(), 1);
        let r = solve(&p, &mut b, &SolverOptions::default());
        assert_eq!(r.status, SolveStatus::DegreesOfFreedomError);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let p = hyperbola();
        let mut b = SparseBackend::new(PivotOptions::default(), 1);
        let opts = SolverOptions { max_iter: 1, ..Default::default() };
        let r = solve(&p, &mut b, &opts);
        assert_eq!(r.status, SolveStatus::IterationLimit);
        assert_eq!(r.iterations, 1);
    }
}
