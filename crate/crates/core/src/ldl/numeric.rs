//! Multifrontal numeric factorization with threshold partial pivoting.
//!
//! Fronts follow the elimination tree one node at a time; candidates that
//! fail the threshold test are delayed into the parent front. Dense front
//! updates are row-parallel, which keeps results bit-identical for any
//! worker count.

use super::{
    DBlock, Inertia, LdlError, NumericFactorization, PivotOptions, SymbolicFactorization,
};
use crate::sparse::{Permutation, SymCsc, ROOT};
use rayon::prelude::*;

/// An unassembled contribution passed from a child front to its parent.
struct Update {
    /// Global positions; the first `ncand` are delayed pivot candidates.
    idx: Vec<usize>,
    ncand: usize,
    /// Full symmetric row-major matrix over `idx`.
    mat: Vec<f64>,
}

enum Pivot {
    Zero(usize),
    One(usize),
    Two(usize, usize),
}

/// Row sizes below which the parallel update path is not worth spawning.
const PAR_MIN_ROWS: usize = 96;

pub fn factorize(
    sym: &SymbolicFactorization,
    a: &SymCsc,
    opts: &PivotOptions,
) -> Result<NumericFactorization, LdlError> {
    let n = a.n;
    if sym.perm.len() != n {
        return Err(LdlError::DimensionMismatch(format!(
            "analyzed order {} vs matrix order {}",
            sym.perm.len(),
            n
        )));
    }
    let b = a.permute(&sym.perm);
    // The analyzed pattern must cover this matrix: every entry of b must lie
    // inside the symbolic fill.
    for (r, c, _) in b.iter() {
        if r != c && sym.pattern[c].binary_search(&r).is_err() {
            return Err(LdlError::PatternMismatch);
        }
    }

    let max_abs = b.max_abs();
    let zero_abs = opts.zero_pivot_tol * max_abs;

    let mut state = FactorState {
        elim_seq: Vec::with_capacity(n),
        l_cols: Vec::with_capacity(n),
        d_blocks: Vec::new(),
        inertia: Inertia { positive: 0, negative: 0, zero: 0 },
        delayed: 0,
        gmax: max_abs,
        threshold: opts.threshold,
        zero_abs,
    };

    let mut pending: Vec<Option<Update>> = (0..n).map(|_| None).collect();
    let children = sym.tree.children();
    let mut loc = vec![usize::MAX; n]; // global position -> front slot

    for &j in &sym.tree.postorder() {
        // Candidate set: delayed pivots from children, then j itself.
        let mut cands: Vec<usize> = Vec::new();
        let mut kids: Vec<Update> = Vec::new();
        for &c in &children[j] {
            if let Some(u) = pending[c].take() {
                cands.extend_from_slice(&u.idx[..u.ncand]);
                kids.push(u);
            }
        }
        cands.push(j);
        cands.sort_unstable();

        let mut border: Vec<usize> = Vec::new();
        for k in b.col_start[j]..b.col_start[j + 1] {
            let r = b.row_idx[k];
            if r > j {
                border.push(r);
            }
        }
        for u in &kids {
            for &g in &u.idx[u.ncand..] {
                if g != j {
                    border.push(g);
                }
            }
        }
        border.sort_unstable();
        border.dedup();

        let ncand = cands.len();
        let idx: Vec<usize> = cands.iter().chain(border.iter()).copied().collect();
        let f = idx.len();
        for (s, &g) in idx.iter().enumerate() {
            loc[g] = s;
        }

        // Assemble: A column j, then child updates in child order.
        let mut mat = vec![0.0; f * f];
        for k in b.col_start[j]..b.col_start[j + 1] {
            let (r, v) = (b.row_idx[k], b.values[k]);
            let (sr, sj) = (loc[r], loc[j]);
            mat[sr * f + sj] += v;
            if sr != sj {
                mat[sj * f + sr] += v;
            }
        }
        for u in &kids {
            let uf = u.idx.len();
            for (si, &gi) in u.idx.iter().enumerate() {
                let pi = loc[gi];
                let urow = &u.mat[si * uf..(si + 1) * uf];
                let row = &mut mat[pi * f..(pi + 1) * f];
                for (sj, &gj) in u.idx.iter().enumerate() {
                    row[loc[gj]] += urow[sj];
                }
            }
        }
        drop(kids);
        for &v in &mat {
            if v.abs() > state.gmax {
                state.gmax = v.abs();
            }
        }

        let is_root = sym.tree.parent[j] == ROOT;
        let remaining = eliminate_front(&mut state, &idx, ncand, &mut mat, is_root)?;

        for &g in &idx {
            loc[g] = usize::MAX;
        }

        if !remaining.is_empty() {
            // Delay the unpivoted candidates plus the live border upward.
            debug_assert!(!is_root);
            let live: Vec<usize> = remaining
                .iter()
                .copied()
                .chain(ncand..f)
                .collect();
            state.delayed += remaining.len();
            let uf = live.len();
            let mut umat = vec![0.0; uf * uf];
            for (si, &s) in live.iter().enumerate() {
                for (tj, &t) in live.iter().enumerate() {
                    umat[si * uf + tj] = mat[s * f + t];
                }
            }
            pending[j] = Some(Update {
                idx: live.iter().map(|&s| idx[s]).collect(),
                ncand: remaining.len(),
                mat: umat,
            });
        } else if ncand < f {
            // All candidates eliminated; pass the Schur complement over the
            // border up the tree.
            let live: Vec<usize> = (ncand..f).collect();
            let uf = live.len();
            let mut umat = vec![0.0; uf * uf];
            for (si, &s) in live.iter().enumerate() {
                for (tj, &t) in live.iter().enumerate() {
                    umat[si * uf + tj] = mat[s * f + t];
                }
            }
            pending[j] = Some(Update {
                idx: live.iter().map(|&s| idx[s]).collect(),
                ncand: 0,
                mat: umat,
            });
        }
    }

    debug_assert_eq!(state.elim_seq.len(), n);
    debug_assert_eq!(state.inertia.total(), n);

    // Remap L rows from symbolic positions to elimination-sequence indices.
    let mut pos2seq = vec![0usize; n];
    for (k, &p) in state.elim_seq.iter().enumerate() {
        pos2seq[p] = k;
    }
    let mut l_cols = Vec::with_capacity(n);
    for (rows, vals) in state.l_cols {
        let mut entries: Vec<(usize, f64)> =
            rows.into_iter().map(|p| pos2seq[p]).zip(vals).collect();
        entries.sort_by_key(|&(r, _)| r);
        let (r, v): (Vec<usize>, Vec<f64>) = entries.into_iter().unzip();
        l_cols.push((r, v));
    }

    let effective_perm =
        Permutation { order: state.elim_seq.iter().map(|&p| sym.perm.order[p]).collect() };

    Ok(NumericFactorization {
        n,
        effective_perm,
        l_cols,
        d_blocks: state.d_blocks,
        inertia: state.inertia,
        delayed_pivots: state.delayed,
        growth_factor: if max_abs > 0.0 { (state.gmax / max_abs).max(1.0) } else { 1.0 },
        matrix: a.clone(),
        refine: opts.refine,
    })
}

struct FactorState {
    elim_seq: Vec<usize>,
    l_cols: Vec<(Vec<usize>, Vec<f64>)>,
    d_blocks: Vec<DBlock>,
    inertia: Inertia,
    delayed: usize,
    gmax: f64,
    threshold: f64,
    zero_abs: f64,
}

/// Eliminates as many candidates of the front as the threshold test
/// permits; at a root the threshold is relaxed until every candidate is
/// pivoted. Returns the slots of candidates left unpivoted.
fn eliminate_front(
    state: &mut FactorState,
    idx: &[usize],
    ncand: usize,
    mat: &mut [f64],
    is_root: bool,
) -> Result<Vec<usize>, LdlError> {
    let f = idx.len();
    let mut eliminated = vec![false; f];
    let mut live_cands: Vec<usize> = (0..ncand).collect();
    let mut u_eff = state.threshold;
    let mut relaxations = 0usize;

    while !live_cands.is_empty() {
        match find_pivot(mat, f, ncand, &eliminated, &live_cands, state.zero_abs, u_eff) {
            Some(Pivot::Zero(q)) => {
                eliminated[q] = true;
                live_cands.retain(|&s| s != q);
                state.elim_seq.push(idx[q]);
                state.l_cols.push((Vec::new(), Vec::new()));
                state.d_blocks.push(DBlock::Single(0.0));
                state.inertia.zero += 1;
            }
            Some(Pivot::One(q)) => {
                eliminate_1x1(state, idx, mat, f, &mut eliminated, q);
                live_cands.retain(|&s| s != q);
            }
            Some(Pivot::Two(q, r)) => {
                eliminate_2x2(state, idx, mat, f, &mut eliminated, q, r);
                live_cands.retain(|&s| s != q && s != r);
            }
            None => {
                if !is_root {
                    break;
                }
                u_eff *= 0.5;
                relaxations += 1;
                if relaxations > 2000 {
                    return Err(LdlError::Internal(
                        "root front could not be fully pivoted".into(),
                    ));
                }
            }
        }
    }

    // Track growth over what remains of the front.
    for s in 0..f {
        if !eliminated[s] {
            for t in 0..f {
                if !eliminated[t] {
                    let v = mat[s * f + t].abs();
                    if v > state.gmax {
                        state.gmax = v;
                    }
                }
            }
        }
    }
    Ok(live_cands)
}

fn find_pivot(
    mat: &[f64],
    f: usize,
    ncand: usize,
    eliminated: &[bool],
    live_cands: &[usize],
    zero_abs: f64,
    u_eff: f64,
) -> Option<Pivot> {
    let colmax = |q: usize, skip: &[usize]| -> f64 {
        let mut m = 0.0f64;
        for s in 0..f {
            if !eliminated[s] && s != q && !skip.contains(&s) {
                m = m.max(mat[s * f + q].abs());
            }
        }
        m
    };

    for &q in live_cands {
        let d = mat[q * f + q];
        let off = colmax(q, &[]);
        if d.abs().max(off) <= zero_abs {
            return Some(Pivot::Zero(q));
        }
        if d.abs() > zero_abs && d.abs() >= u_eff * off {
            return Some(Pivot::One(q));
        }
    }
    let _ = ncand;
    for &q in live_cands {
        // Pair with the candidate carrying the largest coupling to q.
        let mut best: Option<usize> = None;
        let mut best_mag = zero_abs;
        for &r in live_cands {
            if r != q {
                let m = mat[r * f + q].abs();
                if m > best_mag {
                    best_mag = m;
                    best = Some(r);
                }
            }
        }
        let Some(r) = best else { continue };
        let a = mat[q * f + q];
        let b = mat[r * f + r];
        let c = mat[r * f + q];
        let det = a * b - c * c;
        if det >= 0.0 {
            continue;
        }
        let cq = colmax(q, &[r]);
        let cr = colmax(r, &[q]);
        let inv_det = 1.0 / det.abs();
        let g1 = (b.abs() * cq + c.abs() * cr) * inv_det;
        let g2 = (c.abs() * cq + a.abs() * cr) * inv_det;
        if g1.max(g2) <= 1.0 / u_eff {
            return Some(Pivot::Two(q, r));
        }
    }
    None
}

fn eliminate_1x1(
    state: &mut FactorState,
    idx: &[usize],
    mat: &mut [f64],
    f: usize,
    eliminated: &mut [bool],
    q: usize,
) {
    let d = mat[q * f + q];
    eliminated[q] = true;

    // Column copy before the update touches it.
    let mut col = vec![0.0; f];
    let mut l = vec![0.0; f];
    for s in 0..f {
        if !eliminated[s] {
            col[s] = mat[s * f + q];
            l[s] = col[s] / d;
        }
    }

    let mut rows = Vec::new();
    let mut vals = Vec::new();
    for s in 0..f {
        if !eliminated[s] && l[s] != 0.0 {
            rows.push(idx[s]);
            vals.push(l[s]);
        }
    }
    state.elim_seq.push(idx[q]);
    state.l_cols.push((rows, vals));
    state.d_blocks.push(DBlock::Single(d));
    if d > 0.0 {
        state.inertia.positive += 1;
    } else {
        state.inertia.negative += 1;
    }

    apply_update(mat, f, eliminated, |s, row| {
        let ls = l[s];
        if ls != 0.0 {
            for (t, rv) in row.iter_mut().enumerate() {
                *rv -= ls * col[t];
            }
        }
    });
}

fn eliminate_2x2(
    state: &mut FactorState,
    idx: &[usize],
    mat: &mut [f64],
    f: usize,
    eliminated: &mut [bool],
    q: usize,
    r: usize,
) {
    let a = mat[q * f + q];
    let b = mat[r * f + r];
    let c = mat[r * f + q];
    eliminated[q] = true;
    eliminated[r] = true;

    let inv_det = 1.0 / (a * b - c * c);
    let mut x = vec![0.0; f];
    let mut y = vec![0.0; f];
    let mut l1 = vec![0.0; f];
    let mut l2 = vec![0.0; f];
    for s in 0..f {
        if !eliminated[s] {
            x[s] = mat[s * f + q];
            y[s] = mat[s * f + r];
            l1[s] = (b * x[s] - c * y[s]) * inv_det;
            l2[s] = (-c * x[s] + a * y[s]) * inv_det;
        }
    }

    let mut rows1 = Vec::new();
    let mut vals1 = Vec::new();
    let mut rows2 = Vec::new();
    let mut vals2 = Vec::new();
    for s in 0..f {
        if !eliminated[s] {
            if l1[s] != 0.0 {
                rows1.push(idx[s]);
                vals1.push(l1[s]);
            }
            if l2[s] != 0.0 {
                rows2.push(idx[s]);
                vals2.push(l2[s]);
            }
        }
    }
    state.elim_seq.push(idx[q]);
    state.l_cols.push((rows1, vals1));
    state.elim_seq.push(idx[r]);
    state.l_cols.push((rows2, vals2));
    state.d_blocks.push(DBlock::Pair { a, c, b });
    state.inertia.positive += 1;
    state.inertia.negative += 1;

    apply_update(mat, f, eliminated, |s, row| {
        let (a1, a2) = (l1[s], l2[s]);
        if a1 != 0.0 || a2 != 0.0 {
            for (t, rv) in row.iter_mut().enumerate() {
                *rv -= a1 * x[t] + a2 * y[t];
            }
        }
    });
}

/// Applies `body(slot, row)` to every live row of the front. Rows are
/// independent, so the parallel and sequential paths perform identical
/// per-entry arithmetic and the result does not depend on worker count.
fn apply_update<F>(mat: &mut [f64], f: usize, eliminated: &[bool], body: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    if f >= PAR_MIN_ROWS && rayon::current_num_threads() > 1 {
        mat.par_chunks_mut(f).enumerate().for_each(|(s, row)| {
            if !eliminated[s] {
                body(s, row);
            }
        });
    } else {
        for (s, row) in mat.chunks_mut(f).enumerate() {
            if !eliminated[s] {
                body(s, row);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SymTriplet;

    fn csc(n: usize, entries: &[(usize, usize, f64)]) -> SymCsc {
        SymCsc::from_triplets(&SymTriplet { n, entries: entries.to_vec() }).unwrap()
    }

    fn factor(a: &SymCsc) -> NumericFactorization {
        let order = crate::sparse::fill_reducing_order(a);
        let sym = super::super::analyze(a, &order).unwrap();
        factorize(&sym, a, &PivotOptions::default()).unwrap()
    }

    #[test]
    fn rank_one_matrix_records_zero_pivot() {
        // [[4,2],[2,1]] has eigenvalues {5, 0}.
        let a = csc(2, &[(0, 0, 4.0), (1, 0, 2.0), (1, 1, 1.0)]);
        let sym = super::super::analyze(&a, &Permutation::identity(2)).unwrap();
        let f = factorize(&sym, &a, &PivotOptions::default()).unwrap();
        assert_eq!(f.d_blocks(), &[DBlock::Single(4.0), DBlock::Single(0.0)]);
        assert_eq!(f.inertia(), Inertia { positive: 1, negative: 0, zero: 1 });
    }

    #[test]
    fn swap_matrix_takes_one_2x2_block() {
        let a = csc(2, &[(1, 0, 1.0)]);
        let sym = super::super::analyze(&a, &Permutation::identity(2)).unwrap();
        let f = factorize(&sym, &a, &PivotOptions::default()).unwrap();
        assert_eq!(f.d_blocks().len(), 1);
        match f.d_blocks()[0] {
            DBlock::Pair { a, c, b } => {
                assert!(a * b - c * c < 0.0);
                assert_eq!(c.abs(), 1.0);
            }
            _ => panic!("expected a 2x2 block"),
        }
        assert_eq!(f.inertia(), Inertia { positive: 1, negative: 1, zero: 0 });
    }

    #[test]
    fn identity_is_its_own_factor() {
        let a = csc(5, &(0..5).map(|i| (i, i, 1.0)).collect::<Vec<_>>());
        let f = factor(&a);
        assert_eq!(f.inertia(), Inertia { positive: 5, negative: 0, zero: 0 });
        assert_eq!(f.delayed_pivots, 0);
        for b in f.d_blocks() {
            assert_eq!(*b, DBlock::Single(1.0));
        }
    }

    #[test]
    fn reconstruction_matches_permuted_input() {
        // A small indefinite KKT-like matrix with fill.
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
            ],
        );
        let f = factor(&a);
        let b = a.permute(&f.effective_perm).to_dense();
        let r = f.reconstruct_dense();
        let tol = 1e-10 * f.growth_factor * a.max_abs();
        for (x, y) in b.iter().zip(&r) {
            assert!((x - y).abs() <= tol.max(1e-12), "{x} vs {y}");
        }
        assert_eq!(f.inertia().total(), 5);
    }

    #[test]
    fn rejects_pattern_outside_analysis() {
        let diag = csc(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let sym = super::super::analyze(&diag, &Permutation::identity(2)).unwrap();
        let full = csc(2, &[(0, 0, 1.0), (1, 0, 5.0), (1, 1, 1.0)]);
        assert!(matches!(
            factorize(&sym, &full, &PivotOptions::default()),
            Err(LdlError::PatternMismatch)
        ));
    }

    #[test]
    fn inertia_of_named_examples() {
        let id3 = csc(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
        assert_eq!(factor(&id3).inertia(), Inertia { positive: 3, negative: 0, zero: 0 });

        // KKT of min x^2/2 s.t. x = 1: eigenvalues (1 ± sqrt 5)/2.
        let kkt = csc(2, &[(0, 0, 1.0), (1, 0, 1.0)]);
        assert_eq!(factor(&kkt).inertia(), Inertia { positive: 1, negative: 1, zero: 0 });

        let d = csc(3, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert_eq!(factor(&d).inertia(), Inertia { positive: 1, negative: 1, zero: 1 });
    }

    #[test]
    fn factorization_is_deterministic() {
        let a = csc(
            4,
            &[(0, 0, 0.5), (1, 0, 2.0), (1, 1, -0.25), (2, 1, 1.0), (3, 2, 1.0), (3, 3, 2.0)],
        );
        let f1 = factor(&a);
        let f2 = factor(&a);
        assert_eq!(f1.effective_perm.order, f2.effective_perm.order);
        assert_eq!(f1.l_cols, f2.l_cols);
        assert_eq!(f1.d_blocks, f2.d_blocks);
    }
}
