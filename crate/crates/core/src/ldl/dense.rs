//! Dense symmetric indefinite factorization with Bunch–Kaufman pivoting.
//! Serves as the oracle backend and handles small systems directly.

use super::{DBlock, Inertia, LdlError, PivotOptions};
use crate::sparse::SymCsc;

/// P A Pᵀ = L D Lᵀ of a dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct DenseFactorization {
    n: usize,
    /// Position k of the pivoted system holds original variable `perm[k]`.
    perm: Vec<usize>,
    /// Row-major working matrix; the strict lower triangle holds L.
    mat: Vec<f64>,
    d_blocks: Vec<DBlock>,
    inertia: Inertia,
}

const ALPHA: f64 = 0.6403882032022076; // (1 + sqrt(17)) / 8

impl DenseFactorization {
    /// Factorizes the sparse matrix densely; `limit` caps the order.
    pub fn new(a: &SymCsc, opts: &PivotOptions, limit: usize) -> Result<Self, LdlError> {
        if a.n > limit {
            return Err(LdlError::DenseLimitExceeded { n: a.n, limit });
        }
        Ok(Self::from_dense(a.n, a.to_dense(), opts))
    }

    /// Factorizes a full symmetric row-major matrix.
    pub fn from_dense(n: usize, mut m: Vec<f64>, opts: &PivotOptions) -> Self {
        assert_eq!(m.len(), n * n, "matrix must be n x n");
        let max_abs = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let zero_abs = opts.zero_pivot_tol * max_abs;

        let mut perm: Vec<usize> = (0..n).collect();
        let mut d_blocks = Vec::new();
        let mut inertia = Inertia { positive: 0, negative: 0, zero: 0 };

        let swap = |m: &mut [f64], perm: &mut [usize], i: usize, j: usize| {
            if i == j {
                return;
            }
            perm.swap(i, j);
            for t in 0..n {
                m.swap(i * n + t, j * n + t);
            }
            for t in 0..n {
                m.swap(t * n + i, t * n + j);
            }
        };

        let mut k = 0;
        while k < n {
            let akk = m[k * n + k];
            // Largest subdiagonal magnitude of column k.
            let (mut lambda, mut r) = (0.0f64, k);
            for i in k + 1..n {
                let v = m[i * n + k].abs();
                if v > lambda {
                    lambda = v;
                    r = i;
                }
            }

            if akk.abs().max(lambda) <= zero_abs {
                // Structurally/numerically zero column.
                for i in k + 1..n {
                    m[i * n + k] = 0.0;
                }
                d_blocks.push(DBlock::Single(0.0));
                inertia.zero += 1;
                k += 1;
                continue;
            }

            let use_two = if akk.abs() >= ALPHA * lambda {
                false
            } else {
                // sigma: largest off-diagonal magnitude in column r of the
                // trailing block.
                let mut sigma = 0.0f64;
                for i in k..n {
                    if i != r {
                        sigma = sigma.max(m[i * n + r].abs());
                    }
                }
                if akk.abs() * sigma >= ALPHA * lambda * lambda {
                    false
                } else if m[r * n + r].abs() >= ALPHA * sigma {
                    swap(&mut m, &mut perm, k, r);
                    false
                } else {
                    swap(&mut m, &mut perm, k + 1, r);
                    true
                }
            };

            if !use_two {
                let d = m[k * n + k];
                let col: Vec<f64> = (k + 1..n).map(|i| m[i * n + k]).collect();
                for (o, i) in (k + 1..n).enumerate() {
                    let li = col[o] / d;
                    m[i * n + k] = li;
                    for (p, j) in (k + 1..=i).enumerate() {
                        m[i * n + j] -= li * col[p];
                        m[j * n + i] = m[i * n + j];
                    }
                }
                d_blocks.push(DBlock::Single(d));
                if d > 0.0 {
                    inertia.positive += 1;
                } else {
                    inertia.negative += 1;
                }
                k += 1;
            } else {
                let a = m[k * n + k];
                let b = m[(k + 1) * n + k + 1];
                let c = m[(k + 1) * n + k];
                let det = a * b - c * c;
                let x: Vec<f64> = (k + 2..n).map(|i| m[i * n + k]).collect();
                let y: Vec<f64> = (k + 2..n).map(|i| m[i * n + k + 1]).collect();
                for (o, i) in (k + 2..n).enumerate() {
                    let l1 = (b * x[o] - c * y[o]) / det;
                    let l2 = (-c * x[o] + a * y[o]) / det;
                    m[i * n + k] = l1;
                    m[i * n + k + 1] = l2;
                    for (p, j) in (k + 2..=i).enumerate() {
                        m[i * n + j] -= l1 * x[p] + l2 * y[p];
                        m[j * n + i] = m[i * n + j];
                    }
                }
                m[(k + 1) * n + k] = 0.0;
                d_blocks.push(DBlock::Pair { a, c, b });
                // Eigenvalue signs of the 2x2 block.
                let t = 0.5 * (a + b);
                let disc = (0.25 * (a - b) * (a - b) + c * c).sqrt();
                for ev in [t + disc, t - disc] {
                    if ev.abs() <= zero_abs {
                        inertia.zero += 1;
                    } else if ev > 0.0 {
                        inertia.positive += 1;
                    } else {
                        inertia.negative += 1;
                    }
                }
                k += 2;
            }
        }

        DenseFactorization { n, perm, mat: m, d_blocks, inertia }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn d_blocks(&self) -> &[DBlock] {
        &self.d_blocks
    }

    /// Solves A x = b for one right-hand side.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LdlError> {
        let n = self.n;
        if b.len() != n {
            return Err(LdlError::DimensionMismatch(format!(
                "rhs length {} vs order {}",
                b.len(),
                n
            )));
        }
        let mut y: Vec<f64> = (0..n).map(|k| b[self.perm[k]]).collect();
        let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let singular_tol = 1e-8 * bmax.max(1.0);

        for k in 0..n {
            let yk = y[k];
            if yk != 0.0 {
                for i in k + 1..n {
                    y[i] -= self.mat[i * n + k] * yk;
                }
            }
        }
        let mut k = 0;
        for blk in &self.d_blocks {
            match *blk {
                DBlock::Single(d) => {
                    if d == 0.0 {
                        if y[k].abs() > singular_tol {
                            return Err(LdlError::SingularFactor);
                        }
                        y[k] = 0.0;
                    } else {
                        y[k] /= d;
                    }
                    k += 1;
                }
                DBlock::Pair { a, c, b } => {
                    let det = a * b - c * c;
                    let (u, v) = (y[k], y[k + 1]);
                    y[k] = (b * u - c * v) / det;
                    y[k + 1] = (-c * u + a * v) / det;
                    k += 2;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for i in k + 1..n {
                s -= self.mat[i * n + k] * y[i];
            }
            y[k] = s;
        }

        let mut x = vec![0.0; n];
        for k in 0..n {
            x[self.perm[k]] = y[k];
        }
        Ok(x)
    }

    pub fn solve_multi(&self, cols: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LdlError> {
        cols.iter().map(|b| self.solve(b)).collect()
    }
}
