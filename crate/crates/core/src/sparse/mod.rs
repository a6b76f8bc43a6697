//! Symmetric sparse matrix storage and the symbolic structures shared by
//! all linear-solver backends.
//!
//! Matrices are symmetric and stored as their lower triangle only, either
//! as loose triplets ([`SymTriplet`]) during assembly or compressed by
//! column ([`SymCsc`]) everywhere else.

mod amd;
mod etree;
mod matrix_market;
mod scaling;

pub use amd::fill_reducing_order;
pub use etree::{etree, EliminationTree, ROOT};
pub(crate) use etree::symbolic_pattern;
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use scaling::max_scaling;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("entry ({row}, {col}) out of range for order {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("entry ({row}, {col}) lies in the strict upper triangle")]
    UpperTriangleEntry { row: usize, col: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFiniteValue { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix market parse error at line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Loose lower-triangle triplet form of a symmetric matrix.
#[derive(Debug, Clone, Default)]
pub struct SymTriplet {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SymTriplet {
    pub fn new(n: usize) -> Self {
        SymTriplet { n, entries: Vec::new() }
    }

    /// Adds an entry, mirroring upper-triangle coordinates into the lower
    /// triangle.
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        if row >= col {
            self.entries.push((row, col, value));
        } else {
            self.entries.push((col, row, value));
        }
    }
}

/// Lower-triangle compressed-column storage of a symmetric matrix.
///
/// Within each column, row indices are strictly increasing and start at or
/// below the diagonal. Duplicate triplets are summed during construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsc {
    pub n: usize,
    pub col_start: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SymCsc {
    /// Builds compressed storage from triplets, summing duplicates.
    pub fn from_triplets(t: &SymTriplet) -> Result<Self, SparseError> {
        let n = t.n;
        for &(row, col, value) in &t.entries {
            if row >= n || col >= n {
                return Err(SparseError::IndexOutOfRange { row, col, n });
            }
            if row < col {
                return Err(SparseError::UpperTriangleEntry { row, col });
            }
            if !value.is_finite() {
                return Err(SparseError::NonFiniteValue { row, col });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> =
            t.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        sorted.sort_by_key(|&(c, r, _)| (c, r));

        let mut col_start = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let (c, r, mut v) = sorted[i];
            let mut j = i + 1;
            while j < sorted.len() && sorted[j].0 == c && sorted[j].1 == r {
                v += sorted[j].2;
                j += 1;
            }
            row_idx.push(r);
            values.push(v);
            col_start[c + 1] += 1;
            i = j;
        }
        for c in 0..n {
            col_start[c + 1] += col_start[c];
        }
        Ok(SymCsc { n, col_start, row_idx, values })
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Iterator over lower-triangle entries as (row, col, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |c| {
            (self.col_start[c]..self.col_start[c + 1])
                .map(move |k| (self.row_idx[k], c, self.values[k]))
        })
    }

    /// Largest absolute entry, zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// y += A x with the symmetric mirror applied.
    pub fn sym_matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, c, v) in self.iter() {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
    }

    /// Symmetric permutation B = PAPᵀ, where position i of the result holds
    /// variable `p.order[i]` of the input.
    pub fn permute(&self, p: &Permutation) -> SymCsc {
        let pos = p.positions();
        let mut t = SymTriplet::new(self.n);
        for (r, c, v) in self.iter() {
            t.push(pos[r], pos[c], v);
        }
        SymCsc::from_triplets(&t).expect("permutation of a valid matrix is valid")
    }

    /// Expands to a dense symmetric matrix in row-major order. Test and
    /// oracle support for small systems.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for (r, c, v) in self.iter() {
            d[r * n + c] += v;
            if r != c {
                d[c * n + r] += v;
            }
        }
        d
    }
}

/// A bijection on [0, n): `order[k]` is the variable placed at position k.
#[derive(Debug, Clone, PartialEq)]
pub struct Permutation {
    pub order: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { order: (0..n).collect() }
    }

    pub fn new(order: Vec<usize>) -> Result<Self, SparseError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(SparseError::DimensionMismatch(format!(
                    "order of length {n} is not a bijection"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { order })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Inverse map: `positions()[v]` is the position of variable v.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0usize; self.order.len()];
        for (k, &v) in self.order.iter().enumerate() {
            pos[v] = k;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_triplets_direct() {
        let t = SymTriplet { n: 2, entries: vec![(0, 0, 4.0), (1, 0, 2.0), (1, 1, 1.0)] };
        let a = SymCsc::from_triplets(&t).unwrap();
        assert_eq!(a.col_start, vec![0, 2, 3]);
        assert_eq!(a.row_idx, vec![0, 1, 1]);
        assert_eq!(a.values, vec![4.0, 2.0, 1.0]);
    }

    #[test]
    fn from_triplets_sums_duplicates() {
        let t = SymTriplet { n: 2, entries: vec![(0, 0, 1.0), (0, 0, 1.0)] };
        let a = SymCsc::from_triplets(&t).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.values, vec![2.0]);
    }

    #[test]
    fn from_triplets_empty() {
        let a = SymCsc::from_triplets(&SymTriplet::new(3)).unwrap();
        assert_eq!(a.col_start, vec![0, 0, 0, 0]);
        assert!(a.row_idx.is_empty());
        assert!(a.values.is_empty());
    }

    #[test]
    fn from_triplets_rejects_bad_input() {
        let t = SymTriplet { n: 2, entries: vec![(2, 0, 1.0)] };
        assert!(matches!(
            SymCsc::from_triplets(&t),
            Err(SparseError::IndexOutOfRange { .. })
        ));
        let t = SymTriplet { n: 2, entries: vec![(0, 1, 1.0)] };
        assert!(matches!(
            SymCsc::from_triplets(&t),
            Err(SparseError::UpperTriangleEntry { .. })
        ));
        let t = SymTriplet { n: 2, entries: vec![(0, 0, f64::NAN)] };
        assert!(matches!(
            SymCsc::from_triplets(&t),
            Err(SparseError::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn push_mirrors_upper_entries() {
        let mut t = SymTriplet::new(3);
        t.push(0, 2, 5.0);
        let a = SymCsc::from_triplets(&t).unwrap();
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![(2, 0, 5.0)]);
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.positions(), vec![1, 2, 0]);
    }
}
