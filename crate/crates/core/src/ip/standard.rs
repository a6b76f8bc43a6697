//! Slack transformation to the internal standard form: every constraint
//! row becomes an equality c(w) = 0 over the augmented variables
//! w = (x, s), with all inequality information moved into bounds.

use super::{NlpProblem, SolveStatus};

/// The slack-transformed problem. Inequality and range rows i gain a
/// slack with bounds [gL_i, gU_i] and become g_i(x) − s_i = 0; equality
/// rows become g_i(x) − gL_i = 0 directly.
pub struct StandardForm<'a> {
    pub p: &'a dyn NlpProblem,
    pub n: usize,
    pub m: usize,
    pub n_aug: usize,
    /// Per constraint row, the slack index in [n, n_aug) if any.
    pub slack_of_row: Vec<Option<usize>>,
    /// Bounds on w (length n_aug).
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Right-hand side subtracted from equality rows (gL where no slack).
    eq_target: Vec<f64>,
    jac_pattern: Vec<(usize, usize)>,
    hess_pattern: Vec<(usize, usize)>,
}

impl<'a> StandardForm<'a> {
    pub fn new(p: &'a dyn NlpProblem) -> Result<Self, SolveStatus> {
        let n = p.num_vars();
        let m = p.num_cons();
        let (xl, xu) = p.var_bounds();
        let (gl, gu) = p.con_bounds();
        assert_eq!(xl.len(), n);
        assert_eq!(gl.len(), m);

        let mut lo = xl;
        let mut hi = xu;
        let mut slack_of_row = vec![None; m];
        let mut eq_target = vec![0.0; m];
        let mut eq_rows = 0usize;
        for i in 0..m {
            if gl[i] == gu[i] {
                eq_target[i] = gl[i];
                eq_rows += 1;
            } else {
                slack_of_row[i] = Some(lo.len());
                lo.push(gl[i]);
                hi.push(gu[i]);
            }
        }
        let n_aug = lo.len();

        // Too few degrees of freedom: more equality rows than variables
        // free to move.
        let free_vars = (0..n).filter(|&i| lo[i] < hi[i]).count();
        if eq_rows > free_vars {
            return Err(SolveStatus::DegreesOfFreedomError);
        }

        let jac_pattern = p.jacobian_pattern();
        let hess_pattern = p.hessian_pattern();
        for &(r, c) in &hess_pattern {
            assert!(r >= c && r < n, "hessian pattern must be lower-triangle over x");
        }

        Ok(StandardForm {
            p,
            n,
            m,
            n_aug,
            slack_of_row,
            lo,
            hi,
            eq_target,
            jac_pattern,
            hess_pattern,
        })
    }

    pub fn objective(&self, w: &[f64]) -> f64 {
        self.p.objective(&w[..self.n])
    }

    /// Objective gradient over w (zero on slack components).
    pub fn gradient(&self, w: &[f64], grad: &mut [f64]) {
        grad[..].fill(0.0);
        self.p.gradient(&w[..self.n], &mut grad[..self.n]);
    }

    /// Equality residuals c(w) (length m).
    pub fn constraints(&self, w: &[f64], c: &mut [f64]) {
        self.p.constraints(&w[..self.n], c);
        for i in 0..self.m {
            match self.slack_of_row[i] {
                Some(s) => c[i] -= w[s],
                None => c[i] -= self.eq_target[i],
            }
        }
    }

    /// ‖c(w)‖₁, the constraint-violation measure of the line search.
    pub fn theta(&self, w: &[f64]) -> f64 {
        let mut c = vec![0.0; self.m];
        self.constraints(w, &mut c);
        c.iter().map(|v| v.abs()).sum()
    }

    /// Jacobian pattern of c over w: original entries plus the −1 slack
    /// column per inequality row.
    pub fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
        let mut pat = self.jac_pattern.clone();
        for (i, s) in self.slack_of_row.iter().enumerate() {
            if let Some(s) = s {
                pat.push((i, *s));
            }
        }
        pat
    }

    pub fn jacobian_values(&self, w: &[f64], vals: &mut [f64]) {
        let base = self.jac_pattern.len();
        self.p.jacobian_values(&w[..self.n], &mut vals[..base]);
        for (k, _) in self.slack_of_row.iter().filter(|s| s.is_some()).enumerate() {
            vals[base + k] = -1.0;
        }
    }

    /// Lagrangian Hessian pattern over w (slacks appear linearly).
    pub fn hessian_pattern(&self) -> &[(usize, usize)] {
        &self.hess_pattern
    }

    pub fn hessian_values(&self, w: &[f64], y: &[f64], vals: &mut [f64]) {
        self.p.hessian_values(&w[..self.n], y, vals);
    }

    /// Jᵀy over w, accumulated into `out`.
    pub fn jac_t_mul(&self, w: &[f64], y: &[f64], out: &mut [f64]) {
        let pat = self.jacobian_pattern();
        let mut vals = vec![0.0; pat.len()];
        self.jacobian_values(w, &mut vals);
        for (&(r, c), &v) in pat.iter().zip(&vals) {
            out[c] += v * y[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip::NlpProblem;

    /// min x s.t. bounds and quadratic range constraint, used to pin the
    /// slack rules down.
    struct Toy {
        n: usize,
        m: usize,
        xl: Vec<f64>,
        xu: Vec<f64>,
        gl: Vec<f64>,
        gu: Vec<f64>,
    }

    impl NlpProblem for Toy {
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
            vec![0.5; self.n]
        }
        fn objective(&self, x: &[f64]) -> f64 {
            x.iter().sum()
        }
        fn gradient(&self, _x: &[f64], grad: &mut [f64]) {
            grad.fill(1.0);
        }
        fn constraints(&self, x: &[f64], c: &mut [f64]) {
            for v in c.iter_mut() {
                *v = x[0] * x[0];
            }
        }
        fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
            (0..self.m).map(|i| (i, 0)).collect()
        }
        fn jacobian_values(&self, x: &[f64], vals: &mut [f64]) {
            vals.fill(2.0 * x[0]);
        }
        fn hessian_pattern(&self) -> Vec<(usize, usize)> {
            vec![(0, 0)]
        }
        fn hessian_values(&self, _x: &[f64], y: &[f64], vals: &mut [f64]) {
            vals[0] = 2.0 * y.iter().sum::<f64>();
        }
    }

    #[test]
    fn bound_only_problem_gains_no_slack() {
        let t = Toy {
            n: 1,
            m: 0,
            xl: vec![0.0],
            xu: vec![1.0],
            gl: vec![],
            gu: vec![],
        };
        let f = StandardForm::new(&t).unwrap();
        assert_eq!(f.n_aug, 1);
        assert_eq!(f.lo, vec![0.0]);
        assert_eq!(f.hi, vec![1.0]);
    }

    #[test]
    fn range_row_gains_bounded_slack() {
        // 0 ≤ x² ≤ 4 → slack s ∈ [0,4] and equality x² − s = 0.
        let t = Toy {
            n: 1,
            m: 1,
            xl: vec![f64::NEG_INFINITY],
            xu: vec![f64::INFINITY],
            gl: vec![0.0],
            gu: vec![4.0],
        };
        let f = StandardForm::new(&t).unwrap();
        assert_eq!(f.n_aug, 2);
        assert_eq!(f.slack_of_row, vec![Some(1)]);
        assert_eq!((f.lo[1], f.hi[1]), (0.0, 4.0));
        let mut c = vec![0.0];
        f.constraints(&[3.0, 4.0], &mut c);
        assert_eq!(c, vec![5.0]);
        assert_eq!(f.jacobian_pattern(), vec![(0, 0), (0, 1)]);
        let mut j = vec![0.0; 2];
        f.jacobian_values(&[3.0, 4.0], &mut j);
        assert_eq!(j, vec![6.0, -1.0]);
    }

    #[test]
    fn too_many_equalities_is_an_error() {
        let t = Toy {
            n: 1,
            m: 2,
            xl: vec![f64::NEG_INFINITY],
            xu: vec![f64::INFINITY],
            gl: vec![1.0, 2.0],
            gu: vec![1.0, 2.0],
        };
        assert!(matches!(StandardForm::new(&t), Err(SolveStatus::DegreesOfFreedomError)));
    }

    #[test]
    fn equality_row_subtracts_target() {
        let t = Toy {
            n: 1,
            m: 1,
            xl: vec![f64::NEG_INFINITY],
            xu: vec![f64::INFINITY],
            gl: vec![1.0],
            gu: vec![1.0],
        };
        let f = StandardForm::new(&t).unwrap();
        assert_eq!(f.n_aug, 1);
        let mut c = vec![0.0];
        f.constraints(&[2.0], &mut c);
        assert_eq!(c, vec![3.0]); // 4 - 1
    }
}
