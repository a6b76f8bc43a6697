//! Direct factorization A = PAPᵀ = LDLᵀ for sparse symmetric indefinite
//! matrices, with threshold pivoting, delayed pivots, inertia reporting,
//! and multi-right-hand-side solves. A dense Bunch–Kaufman backend lives
//! behind the same contract for oracle comparisons and small systems.

mod backend;
mod dense;
mod numeric;
mod solve;
mod symbolic;

pub use backend::{DenseBackend, KktBackend, SparseBackend};
pub use dense::DenseFactorization;
pub use numeric::factorize;
pub use symbolic::analyze;

use crate::sparse::{EliminationTree, Permutation, SymCsc};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LdlError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pattern does not match the analyzed pattern")]
    PatternMismatch,
    #[error("singular factor: zero pivot hit by a nonzero right-hand side component")]
    SingularFactor,
    #[error("matrix order {n} exceeds the dense backend limit {limit}")]
    DenseLimitExceeded { n: usize, limit: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Eigenvalue sign counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn total(&self) -> usize {
        self.positive + self.negative + self.zero
    }
}

/// Threshold-pivoting controls.
///
/// A candidate 1×1 pivot d is accepted when |d| ≥ u · (largest remaining
/// off-diagonal magnitude in its column); otherwise a 2×2 pivot is tried,
/// and pivots failing both tests are delayed to the parent front. Columns
/// whose magnitude stays below `zero_pivot_tol · max|A|` are recorded as
/// zero pivots.
#[derive(Debug, Clone, Copy)]
pub struct PivotOptions {
    /// Threshold u in (0, 0.5].
    pub threshold: f64,
    /// Zero-pivot tolerance, relative to the largest entry of A.
    pub zero_pivot_tol: f64,
    /// Apply one step of fixed-precision iterative refinement per solve.
    pub refine: bool,
}

impl Default for PivotOptions {
    fn default() -> Self {
        PivotOptions { threshold: 0.01, zero_pivot_tol: 1e-14, refine: true }
    }
}

impl PivotOptions {
    /// Preset for interior-point KKT systems. Saddle-point matrices mix
    /// O(1) barrier diagonals with large constraint couplings, so the
    /// general-purpose threshold rejects almost every 1×1 pivot and
    /// floods the fronts with delayed pivots; a tiny threshold keeps the
    /// elimination on the symbolic order, and iterative refinement plus
    /// the step acceptance machinery absorb the extra element growth.
    pub fn interior_point() -> Self {
        PivotOptions { threshold: 1e-8, ..PivotOptions::default() }
    }
}

/// Analyze-phase output: ordering, elimination tree, and the exact fill
/// pattern of L assuming the pivot order survives numerically.
#[derive(Debug, Clone)]
pub struct SymbolicFactorization {
    pub perm: Permutation,
    pub tree: EliminationTree,
    /// Strictly-below-diagonal nonzero count of each factor column.
    pub col_nnz: Vec<usize>,
    /// Predicted off-diagonal nonzeros of L.
    pub factor_nnz: usize,
    /// Per column position, the sorted below-diagonal row positions of L.
    pub(crate) pattern: Vec<Vec<usize>>,
}

/// One block of the block-diagonal factor D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DBlock {
    /// 1×1 pivot value; exactly 0.0 marks a recorded zero pivot.
    Single(f64),
    /// Symmetric 2×2 pivot [[a, c], [c, b]]; spans two positions.
    Pair { a: f64, c: f64, b: f64 },
}

/// Numeric factorization P_eff A P_effᵀ = LDLᵀ.
///
/// `l_cols[k]` holds the below-diagonal entries of column k of the unit
/// lower triangular factor, indexed in elimination order.
#[derive(Debug, Clone)]
pub struct NumericFactorization {
    pub n: usize,
    /// Symbolic order composed with the pivoting interchanges.
    pub effective_perm: Permutation,
    pub(crate) l_cols: Vec<(Vec<usize>, Vec<f64>)>,
    pub(crate) d_blocks: Vec<DBlock>,
    pub inertia: Inertia,
    pub delayed_pivots: usize,
    /// max |front entry| / max |A entry|, at least 1.
    pub growth_factor: f64,
    /// Copy of the factored matrix, kept for iterative refinement.
    pub(crate) matrix: SymCsc,
    pub(crate) refine: bool,
}

impl NumericFactorization {
    /// D blocks in elimination order.
    pub fn d_blocks(&self) -> &[DBlock] {
        &self.d_blocks
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    /// Off-diagonal nonzeros of L actually produced.
    pub fn factor_nnz(&self) -> usize {
        self.l_cols.iter().map(|(r, _)| r.len()).sum()
    }

    /// Dense reconstruction of L·D·Lᵀ, row-major. Test support.
    pub fn reconstruct_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            l[i * n + i] = 1.0;
        }
        for (j, (rows, vals)) in self.l_cols.iter().enumerate() {
            for (&r, &v) in rows.iter().zip(vals) {
                l[r * n + j] = v;
            }
        }
        let mut d = vec![0.0; n * n];
        let mut k = 0;
        for b in &self.d_blocks {
            match *b {
                DBlock::Single(v) => {
                    d[k * n + k] = v;
                    k += 1;
                }
                DBlock::Pair { a, c, b } => {
                    d[k * n + k] = a;
                    d[k * n + k + 1] = c;
                    d[(k + 1) * n + k] = c;
                    d[(k + 1) * n + k + 1] = b;
                    k += 2;
                }
            }
        }
        // L D Lᵀ
        let mut ld = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for t in 0..n {
                    s += l[i * n + t] * d[t * n + j];
                }
                ld[i * n + j] = s;
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for t in 0..n {
                    s += ld[i * n + t] * l[j * n + t];
                }
                out[i * n + j] = s;
            }
        }
        out
    }
}

/// Reads the inertia of a completed factorization.
pub fn inertia(fact: &NumericFactorization) -> Inertia {
    fact.inertia
}
