//! A concrete [`NlpProblem`] covering every generated instance: separable
//! quadratic-plus-linear objective and constraint rows built from linear
//! and bilinear terms, with derivative patterns derived once at build
//! time.

use crate::ip::NlpProblem;
use std::collections::BTreeMap;

/// f(x) = Σ ½ q_i (x_i − t_i)² + Σ l_i x_i,
/// c_r(x) = Σ coeff·x_j + Σ coeff·x_a·x_b  with bounds gL ≤ c ≤ gU.
pub struct SparseNlp {
    pub n: usize,
    pub m: usize,
    q: Vec<f64>,
    target: Vec<f64>,
    lin_obj: Vec<f64>,
    xl: Vec<f64>,
    xu: Vec<f64>,
    gl: Vec<f64>,
    gu: Vec<f64>,
    x0: Vec<f64>,
    con_lin: Vec<(usize, usize, f64)>,
    con_bil: Vec<(usize, usize, usize, f64)>,
    jac_pattern: Vec<(usize, usize)>,
    /// Pattern slot of each linear term.
    jac_lin_slot: Vec<usize>,
    /// Pattern slots of the (row,a) and (row,b) derivatives of each
    /// bilinear term.
    jac_bil_slot: Vec<(usize, usize)>,
    hess_pattern: Vec<(usize, usize)>,
    /// (variable, pattern slot) for each nonzero objective curvature.
    hess_q_slot: Vec<(usize, usize)>,
    /// Pattern slot of each bilinear second derivative.
    hess_bil_slot: Vec<usize>,
}

pub struct SparseNlpBuilder {
    pub n: usize,
    pub m: usize,
    pub q: Vec<f64>,
    pub target: Vec<f64>,
    pub lin_obj: Vec<f64>,
    pub xl: Vec<f64>,
    pub xu: Vec<f64>,
    pub gl: Vec<f64>,
    pub gu: Vec<f64>,
    pub x0: Vec<f64>,
    pub con_lin: Vec<(usize, usize, f64)>,
    pub con_bil: Vec<(usize, usize, usize, f64)>,
}

impl SparseNlpBuilder {
    pub fn new(n: usize, m: usize) -> Self {
        SparseNlpBuilder {
            n,
            m,
            q: vec![0.0; n],
            target: vec![0.0; n],
            lin_obj: vec![0.0; n],
            xl: vec![f64::NEG_INFINITY; n],
            xu: vec![f64::INFINITY; n],
            gl: vec![0.0; m],
            gu: vec![0.0; m],
            x0: vec![0.0; n],
            con_lin: Vec::new(),
            con_bil: Vec::new(),
        }
    }

    pub fn build(self) -> SparseNlp {
        // Jacobian pattern: linear entries and both first derivatives of
        // each bilinear term, merged per (row, col).
        let mut slots: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let slot_of = |key: (usize, usize), slots: &mut BTreeMap<(usize, usize), usize>| {
            let next = slots.len();
            *slots.entry(key).or_insert(next)
        };
        let mut jac_lin_slot = Vec::with_capacity(self.con_lin.len());
        for &(r, c, _) in &self.con_lin {
            jac_lin_slot.push(slot_of((r, c), &mut slots));
        }
        let mut jac_bil_slot = Vec::with_capacity(self.con_bil.len());
        for &(r, a, b, _) in &self.con_bil {
            let sa = slot_of((r, a), &mut slots);
            let sb = slot_of((r, b), &mut slots);
            jac_bil_slot.push((sa, sb));
        }
        let mut jac_pattern = vec![(0, 0); slots.len()];
        for (&(r, c), &s) in &slots {
            jac_pattern[s] = (r, c);
        }

        // Hessian pattern: objective diagonal plus bilinear cross terms,
        // lower triangle.
        let mut hslots: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut hess_q_slot = Vec::new();
        for i in 0..self.n {
            if self.q[i] != 0.0 {
                let s = slot_of((i, i), &mut hslots);
                hess_q_slot.push((i, s));
            }
        }
        let mut hess_bil_slot = Vec::with_capacity(self.con_bil.len());
        for &(_, a, b, _) in &self.con_bil {
            let key = (a.max(b), a.min(b));
            hess_bil_slot.push(slot_of(key, &mut hslots));
        }
        let mut hess_pattern = vec![(0, 0); hslots.len()];
        for (&k, &s) in &hslots {
            hess_pattern[s] = k;
        }

        SparseNlp {
            n: self.n,
            m: self.m,
            q: self.q,
            target: self.target,
            lin_obj: self.lin_obj,
            xl: self.xl,
            xu: self.xu,
            gl: self.gl,
            gu: self.gu,
            x0: self.x0,
            con_lin: self.con_lin,
            con_bil: self.con_bil,
            jac_pattern,
            jac_lin_slot,
            jac_bil_slot,
            hess_pattern,
            hess_q_slot,
            hess_bil_slot,
        }
    }
}

impl SparseNlp {
    pub fn jac_nnz(&self) -> usize {
        self.jac_pattern.len()
    }

    pub fn hess_nnz(&self) -> usize {
        self.hess_pattern.len()
    }
}

impl NlpProblem for SparseNlp {
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
        let mut f = 0.0;
        for i in 0..self.n {
            let d = x[i] - self.target[i];
            f += 0.5 * self.q[i] * d * d + self.lin_obj[i] * x[i];
        }
        f
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for i in 0..self.n {
            grad[i] = self.q[i] * (x[i] - self.target[i]) + self.lin_obj[i];
        }
    }

    fn constraints(&self, x: &[f64], c: &mut [f64]) {
        c.fill(0.0);
        for &(r, j, v) in &self.con_lin {
            c[r] += v * x[j];
        }
        for &(r, a, b, v) in &self.con_bil {
            c[r] += v * x[a] * x[b];
        }
    }

    fn jacobian_pattern(&self) -> Vec<(usize, usize)> {
        self.jac_pattern.clone()
    }

    fn jacobian_values(&self, x: &[f64], vals: &mut [f64]) {
        vals.fill(0.0);
        for (&(_, _, v), &s) in self.con_lin.iter().zip(&self.jac_lin_slot) {
            vals[s] += v;
        }
        for (&(_, a, b, v), &(sa, sb)) in self.con_bil.iter().zip(&self.jac_bil_slot) {
            vals[sa] += v * x[b];
            vals[sb] += v * x[a];
        }
    }

    fn hessian_pattern(&self) -> Vec<(usize, usize)> {
        self.hess_pattern.clone()
    }

    fn hessian_values(&self, _x: &[f64], y: &[f64], vals: &mut [f64]) {
        vals.fill(0.0);
        for &(i, s) in &self.hess_q_slot {
            vals[s] += self.q[i];
        }
        for (&(r, a, b, v), &s) in self.con_bil.iter().zip(&self.hess_bil_slot) {
            // d²/dx_a dx_b of v·x_a·x_b, doubled on the diagonal.
            let w = if a == b { 2.0 * v } else { v };
            vals[s] += y[r] * w;
        }
    }
}
