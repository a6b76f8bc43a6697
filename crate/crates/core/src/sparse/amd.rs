//! Fill-reducing ordering by approximate minimum degree on the quotient
//! graph of the symmetric adjacency pattern.
//!
//! Eliminated variables become elements; external degrees are maintained
//! with the usual |L_e \ L_p| bound and elements are absorbed when they
//! become subsets of the newly formed one. Supervariable detection and
//! dense-row handling are omitted; at the scales this crate targets the
//! plain quotient graph is adequate.

use super::{Permutation, SymCsc};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Returns an elimination order for the pattern of `a`. The result is
/// always a bijection; only its fill quality depends on the heuristic.
pub fn fill_reducing_order(a: &SymCsc) -> Permutation {
    let n = a.n;
    if n == 0 {
        return Permutation::identity(0);
    }

    // Variable adjacency from the strict off-diagonal pattern, deduplicated.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in a.iter() {
        if r != c {
            adj[r].push(c);
            adj[c].push(r);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    let mut dead = vec![false; n];
    let mut degree: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    // Elements are indexed by the pivot that created them.
    let mut elems: Vec<Vec<usize>> = vec![Vec::new(); n]; // elements containing var i
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n]; // alive vars of element e
    let mut elem_alive = vec![false; n];

    // Lazy min-heap keyed by (degree, initial degree, variable); the
    // initial-degree tie-break defers structurally denser nodes.
    let init_deg = degree.clone();
    let mut heap: BinaryHeap<Reverse<(usize, usize, usize)>> =
        (0..n).map(|i| Reverse((degree[i], init_deg[i], i))).collect();

    let mut mark = vec![usize::MAX; n];
    let mut stamp = 0usize;
    let mut w: Vec<usize> = vec![0; n]; // |L_e \ L_p| workspace
    let mut w_stamp = vec![usize::MAX; n];

    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((d, _, p))) = heap.pop() {
        if dead[p] || d != degree[p] {
            continue; // stale heap entry
        }
        dead[p] = true;
        order.push(p);

        // Neighborhood of p: direct alive neighbors plus members of p's
        // elements. This becomes the member set of the new element.
        stamp += 1;
        mark[p] = stamp;
        let mut lp: Vec<usize> = Vec::new();
        adj[p].retain(|&i| !dead[i]);
        for &i in &adj[p] {
            if mark[i] != stamp {
                mark[i] = stamp;
                lp.push(i);
            }
        }
        elems[p].retain(|&e| elem_alive[e]);
        for &e in &elems[p] {
            members[e].retain(|&i| !dead[i]);
            for &i in &members[e] {
                if mark[i] != stamp {
                    mark[i] = stamp;
                    lp.push(i);
                }
            }
            elem_alive[e] = false; // absorbed into the new element
        }
        lp.sort_unstable();

        if lp.is_empty() {
            continue;
        }
        let ep = p;
        elem_alive[ep] = true;
        members[ep] = lp.clone();

        // w[e] = |members[e] \ lp| for every element touching lp.
        for &i in &lp {
            elems[i].retain(|&e| elem_alive[e]);
            for &e in &elems[i] {
                if w_stamp[e] != stamp {
                    w_stamp[e] = stamp;
                    members[e].retain(|&v| !dead[v]);
                    w[e] = members[e].len();
                }
                w[e] -= 1;
            }
        }

        // Aggressive absorption: an element fully covered by lp carries no
        // information beyond ep.
        for &i in &lp {
            for &e in &elems[i] {
                if w_stamp[e] == stamp && w[e] == 0 {
                    elem_alive[e] = false;
                }
            }
        }

        for &i in &lp {
            elems[i].retain(|&e| elem_alive[e]);
            // Drop direct edges now covered by ep or to dead variables.
            adj[i].retain(|&v| !dead[v] && mark[v] != stamp);
            elems[i].push(ep);

            // Approximate external degree.
            let mut deg = lp.len() - 1 + adj[i].len();
            for &e in &elems[i] {
                if e != ep {
                    deg += if w_stamp[e] == stamp { w[e] } else { members[e].len() };
                }
            }
            let deg = deg.min(n - order.len());
            if deg != degree[i] {
                degree[i] = deg;
                heap.push(Reverse((deg, init_deg[i], i)));
            }
        }
    }

    debug_assert_eq!(order.len(), n);
    Permutation { order }
}
