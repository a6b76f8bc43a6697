use super::{LdlError, SymbolicFactorization};
use crate::sparse::{etree, symbolic_pattern, Permutation, SymCsc};

/// Analyze phase: computes the elimination tree and the exact symbolic
/// fill of PAPᵀ for the given ordering.
pub fn analyze(a: &SymCsc, order: &Permutation) -> Result<SymbolicFactorization, LdlError> {
    if order.len() != a.n {
        return Err(LdlError::DimensionMismatch(format!(
            "matrix order {} vs permutation length {}",
            a.n,
            order.len()
        )));
    }
    let tree = etree(a, order);
    let pattern = symbolic_pattern(a, order, &tree);
    let col_nnz: Vec<usize> = pattern.iter().map(|p| p.len()).collect();
    let factor_nnz = col_nnz.iter().sum();
    Ok(SymbolicFactorization { perm: order.clone(), tree, col_nnz, factor_nnz, pattern })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SymTriplet;

    fn csc(n: usize, entries: &[(usize, usize, f64)]) -> SymCsc {
        SymCsc::from_triplets(&SymTriplet { n, entries: entries.to_vec() }).unwrap()
    }

    #[test]
    fn diagonal_has_no_fill() {
        let a = csc(3, &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]);
        let s = analyze(&a, &Permutation::identity(3)).unwrap();
        assert_eq!(s.factor_nnz, 0);
    }

    #[test]
    fn tridiagonal_fill() {
        let mut e = vec![];
        for i in 0..4 {
            e.push((i, i, 2.0));
            if i > 0 {
                e.push((i, i - 1, -1.0));
            }
        }
        let a = csc(4, &e);
        let s = analyze(&a, &Permutation::identity(4)).unwrap();
        assert_eq!(s.col_nnz, vec![1, 1, 1, 0]);
        assert_eq!(s.factor_nnz, 3);
    }

    #[test]
    fn arrow_hub_first_is_dense() {
        let mut e = vec![(0, 0, 4.0)];
        for i in 1..5 {
            e.push((i, i, 1.0));
            e.push((i, 0, 1.0));
        }
        let a = csc(5, &e);
        // Hub first: eliminating the hub connects all leaves.
        let s = analyze(&a, &Permutation::identity(5)).unwrap();
        assert_eq!(s.factor_nnz, 10);
        // Hub last: no fill at all.
        let p = Permutation::new(vec![1, 2, 3, 4, 0]).unwrap();
        let s = analyze(&a, &p).unwrap();
        assert_eq!(s.factor_nnz, 4);
    }

    #[test]
    fn rejects_mismatched_order() {
        let a = csc(2, &[(0, 0, 1.0)]);
        assert!(analyze(&a, &Permutation::identity(3)).is_err());
    }
}
