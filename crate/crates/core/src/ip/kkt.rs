//! Assembly and inertia-corrected solution of the reduced symmetric
//! Newton system
//!
//!   [ W + Σ + δ_w I   ∇c ] [Δw]   = −[ ∇φ_μ + ∇c y ]
//!   [ ∇cᵀ          −δ_c I ] [Δy]      [ c           ]
//!
//! where Σ carries the barrier curvature per finite bound. An accepted
//! step comes from a factorization with inertia exactly (n_aug, m, 0).

use super::{Iterate, SolveStatus, SolverOptions, StandardForm};
use crate::ldl::{Inertia, KktBackend};
use crate::sparse::{SymCsc, SymTriplet};

/// The assembled system of one Newton iteration.
pub struct KktSystem {
    /// Lower triangle of the symmetric matrix, order n_aug + m. Diagonal
    /// entries are always structurally present, so the pattern is
    /// identical for every (δ_w, δ_c) and every iterate.
    pub matrix: SymCsc,
    pub rhs: Vec<f64>,
    pub n_aug: usize,
    pub m: usize,
}

/// The primal-dual direction recovered from a KKT solve.
#[derive(Debug)]
pub struct StepVectors {
    pub dw: Vec<f64>,
    pub dy: Vec<f64>,
    pub delta_w: f64,
    pub delta_c: f64,
    pub corrections: usize,
}

pub fn assemble_kkt(
    form: &StandardForm,
    it: &Iterate,
    delta_w: f64,
    delta_c: f64,
) -> KktSystem {
    let n_aug = form.n_aug;
    let m = form.m;
    let dim = n_aug + m;
    let mut t = SymTriplet::new(dim);

    // (1,1) block: W + Σ + δ_w I, with a structurally full diagonal.
    let hp = form.hessian_pattern();
    let mut hv = vec![0.0; hp.len()];
    form.hessian_values(&it.w, &it.y, &mut hv);
    for (&(r, c), &v) in hp.iter().zip(&hv) {
        t.push(r, c, v);
    }
    for i in 0..n_aug {
        let mut sigma = 0.0;
        if form.lo[i].is_finite() {
            sigma += it.zl[i] / (it.w[i] - form.lo[i]);
        }
        if form.hi[i].is_finite() {
            sigma += it.zu[i] / (form.hi[i] - it.w[i]);
        }
        t.push(i, i, sigma + delta_w);
    }

    // (2,1) block: ∇c rows shifted below the variables.
    let jp = form.jacobian_pattern();
    let mut jv = vec![0.0; jp.len()];
    form.jacobian_values(&it.w, &mut jv);
    for (&(r, c), &v) in jp.iter().zip(&jv) {
        t.push(n_aug + r, c, v);
    }

    // (2,2) block: −δ_c I, structurally present.
    for j in 0..m {
        t.push(n_aug + j, n_aug + j, -delta_c);
    }

    let matrix = SymCsc::from_triplets(&t).expect("assembled KKT entries are valid");

    // rhs = −(∇φ_μ + ∇c y, c).
    let (_, grad_phi) = super::barrier_value_grad(form, it);
    let mut top = grad_phi;
    form.jac_t_mul(&it.w, &it.y, &mut top);
    let mut rhs = vec![0.0; dim];
    for i in 0..n_aug {
        rhs[i] = -top[i];
    }
    let mut c = vec![0.0; m];
    form.constraints(&it.w, &mut c);
    for j in 0..m {
        rhs[n_aug + j] = -c[j];
    }

    KktSystem { matrix, rhs, n_aug, m }
}

/// The δ_w/δ_c escalation schedule, with its cross-iteration memory.
///
/// Sequence: try δ = 0 first; on wrong inertia, δ_c becomes
/// `delta_c_coeff·μ^¼` when zero eigenvalues were reported, and δ_w
/// starts at `delta_w0` (first failure ever) or the last successful value
/// times `delta_w_growth`, then escalates by `delta_w_first_growth` on
/// the very first retry sequence and `delta_w_growth` afterwards. δ_w
/// beyond 1e40 aborts the solve.
pub struct DeltaSchedule {
    delta_w0: f64,
    growth: f64,
    first_growth: f64,
    delta_c_coeff: f64,
    last_successful: f64,
    had_sequence: bool,
    pub total_corrections: usize,
    pub delta_w_last: f64,
}

const DELTA_W_CAP: f64 = 1e40;

impl DeltaSchedule {
    pub fn new(opts: &SolverOptions) -> Self {
        DeltaSchedule {
            delta_w0: opts.delta_w0,
            growth: opts.delta_w_growth,
            first_growth: opts.delta_w_first_growth,
            delta_c_coeff: opts.delta_c_coeff,
            last_successful: 0.0,
            had_sequence: false,
            total_corrections: 0,
            delta_w_last: 0.0,
        }
    }

    /// Factorizes assembled systems until the inertia is (n_aug, m, 0),
    /// then solves for the step. `assemble` rebuilds the system for given
    /// perturbations.
    pub fn corrected_step(
        &mut self,
        backend: &mut dyn KktBackend,
        mu: f64,
        mut assemble: impl FnMut(f64, f64) -> KktSystem,
    ) -> Result<StepVectors, SolveStatus> {
        let target = |sys: &KktSystem| Inertia {
            positive: sys.n_aug,
            negative: sys.m,
            zero: 0,
        };

        let sys = assemble(0.0, 0.0);
        let want = target(&sys);
        backend.factorize(&sys.matrix).map_err(|_| SolveStatus::LinearSolveError)?;
        let got = backend.inertia().expect("factorization just completed");
        if got == want {
            let sol = backend.solve(&sys.rhs).map_err(|_| SolveStatus::LinearSolveError)?;
            self.delta_w_last = 0.0;
            return Ok(split_step(sol, sys.n_aug, 0.0, 0.0, 0));
        }

        let delta_c = if got.zero > 0 { self.delta_c_coeff * mu.powf(0.25) } else { 0.0 };
        let mut delta_w = if !self.had_sequence {
            self.delta_w0
        } else {
            self.last_successful * self.growth
        };
        let factor = if !self.had_sequence { self.first_growth } else { self.growth };
        let mut corrections = 0usize;
        loop {
            corrections += 1;
            self.total_corrections += 1;
            let sys = assemble(delta_w, delta_c);
            backend.factorize(&sys.matrix).map_err(|_| SolveStatus::LinearSolveError)?;
            if backend.inertia().expect("factorization just completed") == want {
                let sol =
                    backend.solve(&sys.rhs).map_err(|_| SolveStatus::LinearSolveError)?;
                self.had_sequence = true;
                self.last_successful = delta_w;
                self.delta_w_last = delta_w;
                return Ok(split_step(sol, sys.n_aug, delta_w, delta_c, corrections));
            }
            delta_w *= factor;
            if delta_w > DELTA_W_CAP {
                return Err(SolveStatus::LinearSolveError);
            }
        }
    }
}

fn split_step(
    sol: Vec<f64>,
    n_aug: usize,
    delta_w: f64,
    delta_c: f64,
    corrections: usize,
) -> StepVectors {
    let dy = sol[n_aug..].to_vec();
    let mut dw = sol;
    dw.truncate(n_aug);
    StepVectors { dw, dy, delta_w, delta_c, corrections }
}

/// Δz per finite bound from the eliminated complementarity rows:
/// Δzl = μ/d − zl − (zl/d)Δw with d the distance to the lower bound, and
/// the mirrored sign for upper bounds.
pub fn recover_dz(
    form: &StandardForm,
    it: &Iterate,
    dw: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n_aug = form.n_aug;
    let mut dzl = vec![0.0; n_aug];
    let mut dzu = vec![0.0; n_aug];
    for i in 0..n_aug {
        if form.lo[i].is_finite() {
            let d = it.w[i] - form.lo[i];
            dzl[i] = it.mu / d - it.zl[i] - it.zl[i] / d * dw[i];
        }
        if form.hi[i].is_finite() {
            let d = form.hi[i] - it.w[i];
            dzu[i] = it.mu / d - it.zu[i] + it.zu[i] / d * dw[i];
        }
    }
    (dzl, dzu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip::NlpProblem;
    use crate::ldl::{DenseBackend, PivotOptions};

    /// min ½x² s.t. x = 1, optionally with a lower bound on x.
    struct Quad {
        bound: Option<f64>,
        m: usize,
    }

    impl NlpProblem for Quad {
        fn num_vars(&self) -> usize {
            1
        }
        fn num_cons(&self) -> usize {
            self.m
        }
        fn var_bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (vec![self.bound.unwrap_or(f64::NEG_INFINITY)], vec![f64::INFINITY])
        }
        fn con_bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (vec![1.0; self.m], vec![1.0; self.m])
        }
        fn initial_point(&self) -> Vec<f64> {
            vec![0.0]
        }
        fn objective(&self, x: &[f64]) -> f64 {
            0.5 * x[0] * x[0]
        }
        fn gradient(&self, x: &[f64], g: &mut [f64]) {
            g[0] = x[0];
        }
        fn constraints(&self, x: &[f64], c: &mut [f64]) {
            for v in c.iter_mut() {
                *v = x[0];
            }
        }
        fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
            (0..self.m).map(|i| (i, 0)).collect()
        }
        fn jacobian_values(&self, _x: &[f64], v: &mut [f64]) {
            v.fill(1.0);
        }
        fn hessian_pattern(&self) -> Vec<(usize, usize)> {
            vec![(0, 0)]
        }
        fn hessian_values(&self, _x: &[f64], _y: &[f64], v: &mut [f64]) {
            v[0] = 1.0;
        }
    }

    #[test]
    fn hand_assembled_equality_kkt() {
        let p = Quad { bound: None, m: 1 };
        let form = StandardForm::new(&p).unwrap();
        let it = Iterate { w: vec![0.0], y: vec![0.0], zl: vec![0.0], zu: vec![0.0], mu: 0.1 };
        let sys = assemble_kkt(&form, &it, 0.0, 0.0);
        assert_eq!(sys.matrix.to_dense(), vec![1.0, 1.0, 1.0, 0.0]);
        assert_eq!(sys.rhs, vec![0.0, 1.0]);

        let sys = assemble_kkt(&form, &it, 0.5, 0.25);
        assert_eq!(sys.matrix.to_dense(), vec![1.5, 1.0, 1.0, -0.25]);
    }

    #[test]
    fn hand_assembled_bound_kkt() {
        // f = x with x ≥ 0 handled by the barrier: 1×1 system [z/x].
        struct Lin;
        impl NlpProblem for Lin {
            fn num_vars(&self) -> usize {
                1
            }
            fn num_cons(&self) -> usize {
                0
            }
            fn var_bounds(&self) -> (Vec<f64>, Vec<f64>) {
                (vec![0.0], vec![f64::INFINITY])
            }
            fn con_bounds(&self) -> (Vec<f64>, Vec<f64>) {
                (vec![], vec![])
            }
            fn initial_point(&self) -> Vec<f64> {
                vec![1.0]
            }
            fn objective(&self, x: &[f64]) -> f64 {
                x[0]
            }
            fn gradient(&self, _x: &[f64], g: &mut [f64]) {
                g[0] = 1.0;
            }
            fn constraints(&self, _x: &[f64], _c: &mut [f64]) {}
            fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
                vec![]
            }
            fn jacobian_values(&self, _x: &[f64], _v: &mut [f64]) {}
            fn hessian_pattern(&self) -> Vec<(usize, usize)> {
                vec![]
            }
            fn hessian_values(&self, _x: &[f64], _y: &[f64], _v: &mut [f64]) {}
        }
        let p = Lin;
        let form = StandardForm::new(&p).unwrap();
        let it = Iterate { w: vec![1.0], y: vec![], zl: vec![1.0], zu: vec![0.0], mu: 1.0 };
        let sys = assemble_kkt(&form, &it, 0.0, 0.0);
        assert_eq!(sys.matrix.to_dense(), vec![1.0]);
        // rhs = −∇φ = −(1 − μ/x) = 0 at the centered point.
        assert_eq!(sys.rhs, vec![0.0]);
    }

    /// Feeds synthetic matrices through the schedule, ignoring the iterate.
    fn synthetic_step(
        entries_for: impl Fn(f64, f64) -> Vec<(usize, usize, f64)>,
        n_aug: usize,
        m: usize,
        sched: &mut DeltaSchedule,
    ) -> Result<StepVectors, SolveStatus> {
        let mut backend = DenseBackend::new(PivotOptions::default(), 100);
        sched.corrected_step(&mut backend, 0.1, |dw, dc| {
            let dim = n_aug + m;
            let t = SymTriplet { n: dim, entries: entries_for(dw, dc) };
            KktSystem {
                matrix: SymCsc::from_triplets(&t).unwrap(),
                rhs: vec![1.0; dim],
                n_aug,
                m,
            }
        })
    }

    #[test]
    fn correct_inertia_accepted_unperturbed() {
        let mut sched = DeltaSchedule::new(&SolverOptions::default());
        let step = synthetic_step(
            |dw, dc| vec![(0, 0, 1.0 + dw), (1, 0, 1.0), (1, 1, -dc)],
            1,
            1,
            &mut sched,
        )
        .unwrap();
        assert_eq!(step.delta_w, 0.0);
        assert_eq!(step.delta_c, 0.0);
        assert_eq!(step.corrections, 0);
    }

    #[test]
    fn wrong_inertia_escalates_until_accepted() {
        // [[−1, 0], [0, 0]] needs δ_w > 1 and δ_c > 0.
        let opts = SolverOptions::default();
        let mut sched = DeltaSchedule::new(&opts);
        let step = synthetic_step(
            |dw, dc| vec![(0, 0, -1.0 + dw), (1, 1, -dc)],
            1,
            1,
            &mut sched,
        )
        .unwrap();
        assert!(step.delta_w > 1.0, "delta_w = {}", step.delta_w);
        assert!(step.delta_c > 0.0);
        assert!(step.corrections > 0);
        // First sequence starts at delta_w0 and scales by first_growth.
        assert_eq!(step.delta_w, opts.delta_w0 * opts.delta_w_first_growth.powi(3));

        // A later sequence starts from last-successful × growth and
        // escalates by growth.
        let step2 = synthetic_step(
            |dw, dc| vec![(0, 0, -1e3 + dw), (1, 1, -dc)],
            1,
            1,
            &mut sched,
        )
        .unwrap();
        assert!(step2.delta_w >= step.delta_w * opts.delta_w_growth);
        let ratio = step2.delta_w / (step.delta_w * opts.delta_w_growth);
        let log = ratio.log(opts.delta_w_growth);
        assert!((log - log.round()).abs() < 1e-9, "escalation uses growth after the first");
    }

    #[test]
    fn unconstrained_positive_definite_passes() {
        let mut sched = DeltaSchedule::new(&SolverOptions::default());
        let step = synthetic_step(|dw, _| vec![(0, 0, 2.0 + dw)], 1, 0, &mut sched).unwrap();
        assert_eq!(step.corrections, 0);
        assert_eq!(step.dw, vec![0.5]);
    }

    #[test]
    fn hopeless_matrix_exceeds_cap() {
        // Inertia can never become (2, 0, 0): the matrix stays singular in
        // one direction regardless of δ_w because assemble ignores it.
        let mut sched = DeltaSchedule::new(&SolverOptions::default());
        let r = synthetic_step(|_, _| vec![(0, 0, 1.0)], 2, 0, &mut sched);
        assert_eq!(r.unwrap_err(), SolveStatus::LinearSolveError);
    }

    #[test]
    fn dz_recovery_identities() {
        struct B;
        impl NlpProblem for B {
            fn num_vars(&self) -> usize {
                1
            }
            fn num_cons(&self) -> usize {
                0
            }
            fn var_bounds(&self) -> (Vec<f64>, Vec<f64>) {
                (vec![0.0], vec![f64::INFINITY])
            }
            fn con_bounds(&self) -> (Vec<f64>, Vec<f64>) {
                (vec![], vec![])
            }
            fn initial_point(&self) -> Vec<f64> {
                vec![1.0]
            }
            fn objective(&self, x: &[f64]) -> f64 {
                x[0]
            }
            fn gradient(&self, _x: &[f64], g: &mut [f64]) {
                g[0] = 1.0;
            }
            fn constraints(&self, _x: &[f64], _c: &mut [f64]) {}
            fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
                vec![]
            }
            fn jacobian_values(&self, _x: &[f64], _v: &mut [f64]) {}
            fn hessian_pattern(&self) -> Vec<(usize, usize)> {
                vec![]
            }
            fn hessian_values(&self, _x: &[f64], _y: &[f64], _v: &mut [f64]) {}
        }
        let p = B;
        let form = StandardForm::new(&p).unwrap();
        let mk = |w: f64, z: f64, mu: f64| Iterate {
            w: vec![w],
            y: vec![],
            zl: vec![z],
            zu: vec![0.0],
            mu,
        };
        let (dzl, _) = recover_dz(&form, &mk(1.0, 1.0, 1.0), &[0.0]);
        assert_eq!(dzl, vec![0.0]);
        let (dzl, _) = recover_dz(&form, &mk(2.0, 1.0, 1.0), &[0.0]);
        assert_eq!(dzl, vec![-0.5]);
        let (dzl, _) = recover_dz(&form, &mk(1.0, 2.0, 0.01), &[0.5]);
        assert!((dzl[0] - (-2.99)).abs() < 1e-15);

        // Linearized complementarity holds exactly:
        // d·Δz + z·Δw = μ − d·z.
        let it = mk(1.7, 0.3, 0.05);
        let dw = [0.21];
        let (dzl, _) = recover_dz(&form, &it, &dw);
        let d = it.w[0];
        let lhs = d * dzl[0] + it.zl[0] * dw[0];
        let rhs = it.mu - d * it.zl[0];
        assert!((lhs - rhs).abs() < 1e-15);
    }
}
