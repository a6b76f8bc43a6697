use super::SymCsc;

/// Symmetric max-norm scaling: s_i = 1/sqrt(max |a_ij| over row/column i),
/// with s_i = 1 for empty rows. Applying S A S bounds every row and column
/// of the scaled matrix by 1 in magnitude.
pub fn max_scaling(a: &SymCsc) -> Vec<f64> {
    let mut maxes = vec![0.0f64; a.n];
    for (r, c, v) in a.iter() {
        let m = v.abs();
        if m > maxes[r] {
            maxes[r] = m;
        }
        if m > maxes[c] {
            maxes[c] = m;
        }
    }
    maxes
        .into_iter()
        .map(|m| if m > 0.0 { 1.0 / m.sqrt() } else { 1.0 })
        .collect()
}
