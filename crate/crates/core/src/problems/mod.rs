//! Scalable PDE-constrained instance generators reproducing the published
//! structural censuses, plus small analytic problems with known optima.

mod elliptic;
mod sparse_nlp;

pub use elliptic::{gen_boundary_control_2d, gen_boundary_control_3d, gen_dist_control_2d};
pub use sparse_nlp::{SparseNlp, SparseNlpBuilder};

use crate::ip::SolveStatus;
use std::io::Write;

/// How many variables carry which combination of finite bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCensus {
    pub both: usize,
    pub lower_only: usize,
    pub upper_only: usize,
    pub free: usize,
}

/// A generated instance with its structural metadata. The counts are
/// formula values; they must equal the realized structure exactly.
pub struct GeneratedNlp {
    pub kind: String,
    /// Grid dimension N, 0 for analytic problems.
    pub n_grid: usize,
    pub nlp: SparseNlp,
    pub n_vars: usize,
    pub n_cons: usize,
    pub jac_nnz: usize,
    pub hess_nnz: usize,
    pub bounds: BoundCensus,
}

impl GeneratedNlp {
    pub fn id(&self) -> String {
        if self.n_grid > 0 {
            format!("{}_n{}", self.kind, self.n_grid)
        } else {
            self.kind.clone()
        }
    }

    /// Bound census measured from the realized bounds.
    pub fn measured_bounds(&self) -> BoundCensus {
        use crate::ip::NlpProblem;
        let (lo, hi) = self.nlp.var_bounds();
        let mut c = BoundCensus { both: 0, lower_only: 0, upper_only: 0, free: 0 };
        for (l, u) in lo.iter().zip(&hi) {
            match (l.is_finite(), u.is_finite()) {
                (true, true) => c.both += 1,
                (true, false) => c.lower_only += 1,
                (false, true) => c.upper_only += 1,
                (false, false) => c.free += 1,
            }
        }
        c
    }

    /// Plain-text instance manifest for harness bookkeeping.
    pub fn write_manifest(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "kind: {}", self.kind)?;
        writeln!(w, "N: {}", self.n_grid)?;
        writeln!(w, "n_vars: {}", self.n_vars)?;
        writeln!(w, "n_cons: {}", self.n_cons)?;
        writeln!(w, "jac_nnz: {}", self.jac_nnz)?;
        writeln!(w, "hess_nnz: {}", self.hess_nnz)?;
        writeln!(
            w,
            "bounds: both={} lower_only={} upper_only={} free={}",
            self.bounds.both, self.bounds.lower_only, self.bounds.upper_only, self.bounds.free
        )
    }
}

/// Expected outcome of an analytic catalog entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    Objective(f64),
    Status(SolveStatus),
}

/// Fixed catalog of desk-size problems with closed-form answers.
pub fn analytic_suite() -> Vec<(GeneratedNlp, Expectation)> {
    let mut out = Vec::new();

    // (a) min x s.t. x ≥ 1: optimum 1 at the bound.
    let mut b = SparseNlpBuilder::new(1, 0);
    b.lin_obj[0] = 1.0;
    b.xl[0] = 1.0;
    b.x0[0] = 5.0;
    out.push((
        wrap("analytic_a", b),
        Expectation::Objective(1.0),
    ));

    // (b) min ½(x−2)² on [0, 10]: interior optimum 0 at x = 2.
    let mut b = SparseNlpBuilder::new(1, 0);
    b.q[0] = 1.0;
    b.target[0] = 2.0;
    b.xl[0] = 0.0;
    b.xu[0] = 10.0;
    b.x0[0] = 5.0;
    out.push((wrap("analytic_b", b), Expectation::Objective(0.0)));

    // (c) min x₁+x₂ s.t. x₁x₂ = 1, x ≥ 0: optimum 2 at (1, 1).
    let mut b = SparseNlpBuilder::new(2, 1);
    b.lin_obj = vec![1.0, 1.0];
    b.xl = vec![0.0, 0.0];
    b.x0 = vec![0.5, 2.0];
    b.con_bil.push((0, 0, 1, 1.0));
    b.gl[0] = 1.0;
    b.gu[0] = 1.0;
    out.push((wrap("analytic_c", b), Expectation::Objective(2.0)));

    // (d) three equalities over two variables: too few degrees of freedom.
    let mut b = SparseNlpBuilder::new(2, 3);
    b.lin_obj = vec![1.0, 1.0];
    b.con_lin.extend([(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0), (2, 0, 1.0)]);
    b.gl = vec![1.0, 0.0, 0.0];
    b.gu = vec![1.0, 0.0, 0.0];
    out.push((
        wrap("analytic_d", b),
        Expectation::Status(SolveStatus::DegreesOfFreedomError),
    ));

    out
}

fn wrap(kind: &str, b: SparseNlpBuilder) -> GeneratedNlp {
    let (n, m) = (b.n, b.m);
    let nlp = b.build();
    let (jac_nnz, hess_nnz) = (nlp.jac_nnz(), nlp.hess_nnz());
    let mut g = GeneratedNlp {
        kind: kind.into(),
        n_grid: 0,
        n_vars: n,
        n_cons: m,
        jac_nnz,
        hess_nnz,
        bounds: BoundCensus { both: 0, lower_only: 0, upper_only: 0, free: 0 },
        nlp,
    };
    g.bounds = g.measured_bounds();
    g
}
