//! Triangular and block-diagonal solves against a completed factorization:
//! Ly = Pb, Dz = y, LᵀP⁻ᵀx = z, with optional one-step refinement.

use super::{DBlock, LdlError, NumericFactorization};

impl NumericFactorization {
    /// Solves A x = b for one right-hand side.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LdlError> {
        if b.len() != self.n {
            return Err(LdlError::DimensionMismatch(format!(
                "rhs length {} vs order {}",
                b.len(),
                self.n
            )));
        }
        let mut x = self.solve_raw(b, true)?;
        if self.refine {
            // r = b - A x, then one corrective solve. Zero pivots are
            // projected out here: the residual of a consistent singular
            // system may still have components in the null directions.
            let mut r = b.to_vec();
            let mut ax = vec![0.0; self.n];
            self.matrix.sym_matvec(&x, &mut ax);
            for i in 0..self.n {
                r[i] -= ax[i];
            }
            let dx = self.solve_raw(&r, false)?;
            for i in 0..self.n {
                x[i] += dx[i];
            }
        }
        Ok(x)
    }

    /// Solves one system per column; identical to per-column [`solve`]
    /// calls, reusing the factorization.
    pub fn solve_multi(&self, cols: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LdlError> {
        cols.iter().map(|b| self.solve(b)).collect()
    }

    /// One forward/diagonal/backward pass without refinement. `strict`
    /// makes a zero pivot met by a nonzero component an error; otherwise
    /// that component is projected to zero.
    fn solve_raw(&self, b: &[f64], strict: bool) -> Result<Vec<f64>, LdlError> {
        let n = self.n;
        let order = &self.effective_perm.order;
        let mut y = vec![0.0; n];
        for k in 0..n {
            y[k] = b[order[k]];
        }
        let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let singular_tol = 1e-8 * bmax.max(1.0);

        // Ly = Pb.
        for j in 0..n {
            let yj = y[j];
            if yj != 0.0 {
                let (rows, vals) = &self.l_cols[j];
                for (&r, &v) in rows.iter().zip(vals) {
                    y[r] -= v * yj;
                }
            }
        }

        // Dz = y.
        let mut k = 0;
        for blk in &self.d_blocks {
            match *blk {
                DBlock::Single(d) => {
                    if d == 0.0 {
                        if strict && y[k].abs() > singular_tol {
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

        // LᵀP⁻ᵀx = z.
        for j in (0..n).rev() {
            let (rows, vals) = &self.l_cols[j];
            let mut s = y[j];
            for (&r, &v) in rows.iter().zip(vals) {
                s -= v * y[r];
            }
            y[j] = s;
        }

        let mut x = vec![0.0; n];
        for k in 0..n {
            x[order[k]] = y[k];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{analyze, factorize, PivotOptions};
    use crate::sparse::{fill_reducing_order, SymCsc, SymTriplet};

    fn csc(n: usize, entries: &[(usize, usize, f64)]) -> SymCsc {
        SymCsc::from_triplets(&SymTriplet { n, entries: entries.to_vec() }).unwrap()
    }

    fn factor(a: &SymCsc) -> NumericFactorization {
        let order = fill_reducing_order(a);
        let sym = analyze(a, &order).unwrap();
        factorize(&sym, a, &PivotOptions::default()).unwrap()
    }

    use super::NumericFactorization;

    #[test]
    fn diagonal_solve() {
        let a = csc(2, &[(0, 0, 2.0), (1, 1, 3.0)]);
        assert_eq!(factor(&a).solve(&[4.0, 9.0]).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn swap_operator_solve() {
        let a = csc(2, &[(1, 0, 1.0)]);
        assert_eq!(factor(&a).solve(&[1.0, 2.0]).unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn tridiagonal_solve_recovers_known_solution() {
        let mut e = vec![];
        for i in 0..4 {
            e.push((i, i, 2.0));
            if i > 0 {
                e.push((i, i - 1, -1.0));
            }
        }
        let a = csc(4, &e);
        let xt = [1.0, 2.0, 3.0, 4.0];
        let mut b = vec![0.0; 4];
        a.sym_matvec(&xt, &mut b);
        let x = factor(&a).solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(&xt) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_residual_is_small() {
        let a = csc(
            5,
            &[
                (0, 0, 4.0),
                (1, 1, 2.0),
                (2, 2, -1.0),
                (1, 0, 1.0),
                (3, 0, 1.0),
                (3, 1, -2.0),
                (4, 2, 3.0),
                (4, 3, 1.0),
                (4, 4, 0.5),
            ],
        );
        let f = factor(&a);
        let b = [1.0, -2.0, 0.5, 3.0, -1.0];
        let x = f.solve(&b).unwrap();
        let mut ax = vec![0.0; 5];
        a.sym_matvec(&x, &mut ax);
        // inf-norm of A by row sums of the mirrored matrix
        let mut row_sum = vec![0.0f64; 5];
        for (r, c, v) in a.iter() {
            row_sum[r] += v.abs();
            if r != c {
                row_sum[c] += v.abs();
            }
        }
        let a_norm = row_sum.iter().cloned().fold(0.0f64, f64::max);
        let x_norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let b_norm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = ax
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (axi, bi)| m.max((axi - bi).abs()));
        assert!(res / (a_norm * x_norm + b_norm) <= 1e-10);
    }

    #[test]
    fn multi_rhs_equals_single_solves_bitwise() {
        let a = csc(3, &[(0, 0, 2.0), (1, 0, 1.0), (1, 1, -3.0), (2, 2, 5.0)]);
        let f = factor(&a);
        let cols = vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.0, 4.0], vec![0.5, 0.5, 0.5]];
        let multi = f.solve_multi(&cols).unwrap();
        for (b, x) in cols.iter().zip(&multi) {
            assert_eq!(&f.solve(b).unwrap(), x);
        }
    }

    #[test]
    fn incompatible_singular_system_fails() {
        // Rank-1 matrix; range is spanned by [2, 1].
        let a = csc(2, &[(0, 0, 4.0), (1, 0, 2.0), (1, 1, 1.0)]);
        let f = factor(&a);
        assert!(f.solve(&[1.0, 0.0]).is_err());
        // A compatible rhs still solves.
        let x = f.solve(&[4.0, 2.0]).unwrap();
        let mut ax = vec![0.0; 2];
        a.sym_matvec(&x, &mut ax);
        assert!((ax[0] - 4.0).abs() < 1e-10 && (ax[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_wrong_rhs_length() {
        let a = csc(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        assert!(factor(&a).solve(&[1.0]).is_err());
    }
}
