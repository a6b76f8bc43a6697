//! Elliptic optimal-control instance generators on the unit square/cube
//! with mesh width h = 1/(N+1).
//!
//! The published structural censuses pin the layouts exactly; the problem
//! data (desired states, source terms, bound values) are fixed constants
//! so instances are fully reproducible.

use super::sparse_nlp::SparseNlpBuilder;
use super::{BoundCensus, GeneratedNlp};

const ALPHA: f64 = 0.01;
/// Boundary-control data: target state, source, state cap, control range.
const BC_SOURCE: f64 = 20.0;
const BC_STATE_CAP: f64 = 3.2;
const BC_CONTROL_LO: f64 = 1.8;
const BC_CONTROL_HI: f64 = 2.5;
/// Distributed-control data.
const DIST_SOURCE: f64 = 1.0;
const DIST_VAR_LO: f64 = -10.0;
const DIST_VAR_HI: f64 = 10.0;

/// 3D boundary control: states y on the N³ interior grid, controls u on
/// the 6N² boundary faces, one discrete-Laplacian equality per interior
/// node with face controls standing in for neighbors across the boundary.
pub fn gen_boundary_control_3d(n_grid: usize) -> GeneratedNlp {
    assert!(n_grid >= 1, "grid dimension must be at least 1");
    let n = n_grid;
    let h = 1.0 / (n as f64 + 1.0);
    let n_states = n * n * n;
    let n_controls = 6 * n * n;
    let mut b = SparseNlpBuilder::new(n_states + n_controls, n_states);

    let yi = |i: usize, j: usize, k: usize| ((i - 1) * n + (j - 1)) * n + (k - 1);
    // Faces in order: k=0, k=N+1, j=0, j=N+1, i=0, i=N+1; each indexed by
    // the two in-face coordinates.
    let ui = |face: usize, a: usize, b_: usize| n_states + face * n * n + (a - 1) * n + (b_ - 1);

    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let s = yi(i, j, k);
                b.q[s] = h * h * h;
                b.target[s] =
                    3.0 + 5.0 * (i as f64 * h) * (j as f64 * h) * (k as f64 * h);
                b.xu[s] = BC_STATE_CAP;
                b.x0[s] = 2.0;

                // Δ_h y = d: (Σ neighbors − 6y)/h² with boundary
                // neighbors supplied by face controls.
                let row = s;
                let w = 1.0 / (h * h);
                b.con_lin.push((row, s, -6.0 * w));
                let mut nb = |v: usize| b.con_lin.push((row, v, w));
                nb(if k > 1 { yi(i, j, k - 1) } else { ui(0, i, j) });
                nb(if k < n { yi(i, j, k + 1) } else { ui(1, i, j) });
                nb(if j > 1 { yi(i, j - 1, k) } else { ui(2, i, k) });
                nb(if j < n { yi(i, j + 1, k) } else { ui(3, i, k) });
                nb(if i > 1 { yi(i - 1, j, k) } else { ui(4, j, k) });
                nb(if i < n { yi(i + 1, j, k) } else { ui(5, j, k) });
                b.gl[row] = BC_SOURCE;
                b.gu[row] = BC_SOURCE;
            }
        }
    }
    for c in n_states..n_states + n_controls {
        b.q[c] = ALPHA * h * h;
        b.xl[c] = BC_CONTROL_LO;
        b.xu[c] = BC_CONTROL_HI;
        b.x0[c] = 2.0;
    }

    let nlp = b.build();
    GeneratedNlp {
        kind: "bc3d".into(),
        n_grid,
        n_vars: n_states + n_controls,
        n_cons: n_states,
        jac_nnz: 7 * n_states,
        hess_nnz: n_states + n_controls,
        bounds: BoundCensus {
            both: n_controls,
            lower_only: 0,
            upper_only: n_states,
            free: 0,
        },
        nlp,
    }
}

/// 2D boundary control: the 5-point analogue of the 3D family.
pub fn gen_boundary_control_2d(n_grid: usize) -> GeneratedNlp {
    assert!(n_grid >= 1, "grid dimension must be at least 1");
    let n = n_grid;
    let h = 1.0 / (n as f64 + 1.0);
    let n_states = n * n;
    let n_controls = 4 * n;
    let mut b = SparseNlpBuilder::new(n_states + n_controls, n_states);

    let yi = |i: usize, j: usize| (i - 1) * n + (j - 1);
    // Sides in order: j=0, j=N+1, i=0, i=N+1.
    let ui = |side: usize, a: usize| n_states + side * n + (a - 1);

    for i in 1..=n {
        for j in 1..=n {
            let s = yi(i, j);
            b.q[s] = h * h;
            b.target[s] = 3.0 + 5.0 * (i as f64 * h) * (j as f64 * h);
            b.xu[s] = BC_STATE_CAP;
            b.x0[s] = 2.0;

            let row = s;
            let w = 1.0 / (h * h);
            b.con_lin.push((row, s, -4.0 * w));
            let mut nb = |v: usize| b.con_lin.push((row, v, w));
            nb(if j > 1 { yi(i, j - 1) } else { ui(0, i) });
            nb(if j < n { yi(i, j + 1) } else { ui(1, i) });
            nb(if i > 1 { yi(i - 1, j) } else { ui(2, j) });
            nb(if i < n { yi(i + 1, j) } else { ui(3, j) });
            b.gl[row] = BC_SOURCE;
            b.gu[row] = BC_SOURCE;
        }
    }
    for c in n_states..n_states + n_controls {
        b.q[c] = ALPHA * h;
        b.xl[c] = BC_CONTROL_LO;
        b.xu[c] = BC_CONTROL_HI;
        b.x0[c] = 2.0;
    }

    let nlp = b.build();
    GeneratedNlp {
        kind: "bc2d".into(),
        n_grid,
        n_vars: n_states + n_controls,
        n_cons: n_states,
        jac_nnz: 5 * n_states,
        hess_nnz: n_states + n_controls,
        bounds: BoundCensus {
            both: n_controls,
            lower_only: 0,
            upper_only: n_states,
            free: 0,
        },
        nlp,
    }
}

/// 2D distributed control: states on the interior grid plus the 4N edge
/// nodes (corners excluded), controls on the interior grid, a bilinear
/// y·u coupling in each interior row, and two-entry identity rows tying
/// each boundary state to its adjacent interior state.
pub fn gen_dist_control_2d(n_grid: usize) -> GeneratedNlp {
    assert!(n_grid >= 1, "grid dimension must be at least 1");
    let n = n_grid;
    let h = 1.0 / (n as f64 + 1.0);
    let n_int = n * n;
    let n_bnd = 4 * n;
    let n_vars = 2 * n_int + n_bnd;
    let n_cons = n_int + n_bnd;
    let mut b = SparseNlpBuilder::new(n_vars, n_cons);

    let yi = |i: usize, j: usize| (i - 1) * n + (j - 1);
    // Edge nodes in order: j=0, j=N+1, i=0, i=N+1 (corners excluded).
    let bi = |side: usize, a: usize| n_int + side * n + (a - 1);
    let ui = |i: usize, j: usize| n_int + n_bnd + (i - 1) * n + (j - 1);

    for i in 1..=n {
        for j in 1..=n {
            let s = yi(i, j);
            b.q[s] = h * h;
            b.target[s] = 1.0 + (i as f64 * h) * (j as f64 * h);
            b.x0[s] = 1.0;

            let row = s;
            let w = 1.0 / (h * h);
            b.con_lin.push((row, s, -4.0 * w));
            let mut nb = |v: usize| b.con_lin.push((row, v, w));
            nb(if j > 1 { yi(i, j - 1) } else { bi(0, i) });
            nb(if j < n { yi(i, j + 1) } else { bi(1, i) });
            nb(if i > 1 { yi(i - 1, j) } else { bi(2, j) });
            nb(if i < n { yi(i + 1, j) } else { bi(3, j) });
            b.con_bil.push((row, s, ui(i, j), 1.0));
            b.gl[row] = DIST_SOURCE;
            b.gu[row] = DIST_SOURCE;
        }
    }
    // Boundary identities y_b − y_adjacent = 0.
    for side in 0..4 {
        for a in 1..=n {
            let row = n_int + side * n + (a - 1);
            let adj = match side {
                0 => yi(a, 1),
                1 => yi(a, n),
                2 => yi(1, a),
                _ => yi(n, a),
            };
            b.con_lin.push((row, bi(side, a), 1.0));
            b.con_lin.push((row, adj, -1.0));
        }
    }
    for v in 0..n_vars {
        b.xl[v] = DIST_VAR_LO;
        b.xu[v] = DIST_VAR_HI;
        b.x0[v] = 1.0;
    }
    for c in n_int + n_bnd..n_vars {
        b.q[c] = ALPHA * h * h;
    }

    let nlp = b.build();
    GeneratedNlp {
        kind: "dist2d".into(),
        n_grid,
        n_vars,
        n_cons,
        jac_nnz: 6 * n_int + 8 * n,
        hess_nnz: 3 * n_int,
        bounds: BoundCensus { both: n_vars, lower_only: 0, upper_only: 0, free: 0 },
        nlp,
    }
}
