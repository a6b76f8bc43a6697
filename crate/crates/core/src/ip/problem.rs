/// A smooth nonlinear program
///
///   min f(x)  s.t.  gL ≤ g(x) ≤ gU,  xL ≤ x ≤ xU,
///
/// with exact first and second derivatives in fixed sparsity patterns.
/// Bound entries may be ±∞; finite variable bounds must be strictly
/// separated (fixed variables are not supported).
pub trait NlpProblem: Sync {
    fn num_vars(&self) -> usize;
    fn num_cons(&self) -> usize;

    /// (xL, xU), each of length `num_vars`.
    fn var_bounds(&self) -> (Vec<f64>, Vec<f64>);
    /// (gL, gU), each of length `num_cons`; gL = gU marks an equality row.
    fn con_bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn initial_point(&self) -> Vec<f64>;

    fn objective(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], grad: &mut [f64]);
    fn constraints(&self, x: &[f64], c: &mut [f64]);

    /// Constraint Jacobian entries as (row, col), fixed across evaluations.
    fn jacobian_pattern(&self) -> Vec<(usize, usize)>;
    fn jacobian_values(&self, x: &[f64], vals: &mut [f64]);

    /// Lower-triangle entries (row ≥ col) of the Lagrangian Hessian
    /// W = ∇²f + Σ_j y_j ∇²g_j, fixed across evaluations.
    fn hessian_pattern(&self) -> Vec<(usize, usize)>;
    fn hessian_values(&self, x: &[f64], y: &[f64], vals: &mut [f64]);
}
