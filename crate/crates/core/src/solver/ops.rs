//! Staggered difference operators.

/// `(f[j+1] - f[j]) / dx`: node values to cell values.
pub fn dx_node_to_cell(node: &[f64], dx: f64) -> Vec<f64> {
    node.windows(2).map(|p| (p[1] - p[0]) / dx).collect()
}

/// `(g[i+1] - g[i]) / dx` on a ghost-padded cell field: cell values (with
/// one ghost on each side) to node values.
pub fn dx_cell_to_node(padded_cells: &[f64], dx: f64) -> Vec<f64> {
    padded_cells.windows(2).map(|p| (p[1] - p[0]) / dx).collect()
}

/// Harmonic mean of two non-negative interface coefficients.
#[inline]
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        0.0
    } else {
        2.0 * a * b / s
    }
}

/// Trapezoid sum of node samples times `dx`.
pub(crate) fn trapezoid(node: &[f64], dx: f64) -> f64 {
    let n = node.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = node.iter().sum();
    dx * (interior - 0.5 * (node[0] + node[n - 1]))
}
