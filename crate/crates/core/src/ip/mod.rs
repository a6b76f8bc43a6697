//! The barrier interior-point loop: slack transformation, barrier
//! subproblems, inertia-corrected Newton steps, dual recovery, filter line
//! search, and convergence control, parameterized over the linear-solver
//! backend contract.

mod barrier;
mod kkt;
mod linesearch;
mod problem;
mod solve;
mod standard;

pub use barrier::{barrier_value_grad, kkt_error};
pub use kkt::{assemble_kkt, recover_dz, DeltaSchedule, KktSystem, StepVectors};
pub use linesearch::{fraction_to_boundary, line_search, LineSearchOutcome};
pub use problem::NlpProblem;
pub use solve::solve;
pub use standard::StandardForm;

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Acceptable,
    IterationLimit,
    TimeLimit,
    DegreesOfFreedomError,
    LinearSolveError,
    Diverged,
}

impl SolveStatus {
    /// A problem counts as solved under this status.
    pub fn is_solved(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Acceptable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Acceptable => "Acceptable",
            SolveStatus::IterationLimit => "IterationLimit",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::DegreesOfFreedomError => "DegreesOfFreedomError",
            SolveStatus::LinearSolveError => "LinearSolveError",
            SolveStatus::Diverged => "Diverged",
        }
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Optimal" => SolveStatus::Optimal,
            "Acceptable" => SolveStatus::Acceptable,
            "IterationLimit" => SolveStatus::IterationLimit,
            "TimeLimit" => SolveStatus::TimeLimit,
            "DegreesOfFreedomError" => SolveStatus::DegreesOfFreedomError,
            "LinearSolveError" => SolveStatus::LinearSolveError,
            "Diverged" => SolveStatus::Diverged,
            other => return Err(format!("unknown status {other:?}")),
        })
    }
}

/// Tunable parameters of the interior-point loop.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub acceptable_tol: f64,
    pub max_iter: usize,
    /// Wall-clock limit in seconds, checked between iterations.
    pub time_limit: f64,
    pub mu0: f64,
    pub kappa_mu: f64,
    pub theta_mu: f64,
    pub tau_min: f64,
    pub delta_w0: f64,
    pub delta_w_growth: f64,
    pub delta_w_first_growth: f64,
    pub delta_c_coeff: f64,
    pub pivot: crate::ldl::PivotOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            acceptable_tol: 1e-8,
            max_iter: 9999,
            time_limit: 14400.0,
            mu0: 0.1,
            kappa_mu: 0.2,
            theta_mu: 1.5,
            tau_min: 0.99,
            delta_w0: 1e-4,
            delta_w_growth: 8.0,
            delta_w_first_growth: 100.0,
            delta_c_coeff: 1e-8,
            pivot: crate::ldl::PivotOptions::interior_point(),
        }
    }
}

/// Primal-dual point over the slack-transformed variables.
///
/// `zl`/`zu` carry one multiplier per variable; entries for infinite
/// bounds stay exactly zero. Every bounded component is strictly interior
/// and its multiplier strictly positive.
#[derive(Debug, Clone)]
pub struct Iterate {
    /// Variables followed by slacks (length n_aug).
    pub w: Vec<f64>,
    /// Equality multipliers (length m).
    pub y: Vec<f64>,
    pub zl: Vec<f64>,
    pub zu: Vec<f64>,
    pub mu: f64,
}

/// Wall-time breakdown of a solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct Timing {
    pub eval_seconds: f64,
    pub linear_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Final original variables (without slacks).
    pub x: Vec<f64>,
    pub iterations: usize,
    pub objective: f64,
    /// Unscaled-μ termination measure at the final point.
    pub kkt_error: f64,
    pub timing: Timing,
    /// Total factorization retries forced by wrong inertia.
    pub inertia_corrections: usize,
    /// Iterations whose accepted step carried δ_w > 0 or δ_c > 0.
    pub corrected_iterations: usize,
    pub delta_w_last: f64,
}

/// μ⁺ = max(tol/10, min(κ_μ·μ, μ^θ_μ)): monotone Fiacco–McCormick with a
/// superlinear clause, floored so complementarity stays measurable.
pub fn mu_update(mu: f64, opts: &SolverOptions) -> f64 {
    (opts.kappa_mu * mu).min(mu.powf(opts.theta_mu)).max(opts.tol / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_update_schedule() {
        let opts = SolverOptions::default();
        assert!((mu_update(0.1, &opts) - 0.02).abs() < 1e-15);
        assert!((mu_update(0.01, &opts) - 0.001).abs() < 1e-15);
        assert_eq!(mu_update(1e-9, &opts), 1e-9);
    }

    #[test]
    fn mu_sequence_monotone_and_floored() {
        let opts = SolverOptions::default();
        let mut mu = opts.mu0;
        for _ in 0..100 {
            let next = mu_update(mu, &opts);
            assert!(next <= mu);
            assert!(next >= opts.tol / 10.0);
            mu = next;
        }
        assert_eq!(mu, opts.tol / 10.0);
    }
}
