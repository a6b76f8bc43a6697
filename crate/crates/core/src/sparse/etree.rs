use super::{Permutation, SymCsc};

/// Elimination forest over matrix positions. `parent[i]` is the first
/// position after i whose factor column contains row i, or [`ROOT`].
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationTree {
    pub parent: Vec<usize>,
}

pub const ROOT: usize = usize::MAX;

impl EliminationTree {
    pub fn is_root(&self, i: usize) -> bool {
        self.parent[i] == ROOT
    }

    /// Children lists, each sorted ascending.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut ch = vec![Vec::new(); n];
        for i in 0..n {
            if self.parent[i] != ROOT {
                ch[self.parent[i]].push(i);
            }
        }
        ch
    }

    /// Postorder of the forest with children visited in ascending order.
    pub fn postorder(&self) -> Vec<usize> {
        let n = self.parent.len();
        let ch = self.children();
        let mut out = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in (0..n).filter(|&i| self.is_root(i)) {
            stack.push((root, 0));
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if *next < ch[node].len() {
                    let c = ch[node][*next];
                    *next += 1;
                    stack.push((c, 0));
                } else {
                    out.push(node);
                    stack.pop();
                }
            }
        }
        out
    }
}

/// Computes the elimination tree of PAPᵀ by Liu's path-compression scheme.
pub fn etree(a: &SymCsc, p: &Permutation) -> EliminationTree {
    let n = a.n;
    assert_eq!(p.len(), n, "permutation length must match matrix order");
    let b = a.permute(p);
    // Rows must be visited in ascending order so each climb sees the tree
    // built from all earlier rows; gather row adjacency first.
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in b.iter() {
        if r != c {
            rows[r].push(c);
        }
    }
    let mut parent = vec![ROOT; n];
    let mut ancestor = vec![ROOT; n];
    for i in 0..n {
        for &j in &rows[i] {
            // Entry (i, j), j < i: climb from j toward i, compressing paths.
            let mut r = j;
            while r != ROOT && r < i {
                let next = ancestor[r];
                ancestor[r] = i;
                if next == ROOT {
                    parent[r] = i;
                    break;
                }
                r = next;
            }
        }
    }
    EliminationTree { parent }
}

/// Exact fill pattern of L for PAPᵀ assuming the pivot order is not modified
/// numerically. Returns, per column position j, the sorted strictly-below-
/// diagonal row positions of L, computed by elimination-tree row walks.
pub fn symbolic_pattern(a: &SymCsc, p: &Permutation, tree: &EliminationTree) -> Vec<Vec<usize>> {
    let n = a.n;
    let b = a.permute(p);
    // Row adjacency of the strict lower triangle.
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in b.iter() {
        if r != c {
            rows[r].push(c);
        }
    }
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut mark = vec![usize::MAX; n];
    for i in 0..n {
        // Pattern of row i of L: walk up from every entry (i, j), j < i.
        mark[i] = i;
        for &c in &rows[i] {
            let mut j = c;
            while mark[j] != i {
                cols[j].push(i);
                mark[j] = i;
                j = tree.parent[j];
                if j == ROOT {
                    break;
                }
            }
        }
    }
    cols
}
