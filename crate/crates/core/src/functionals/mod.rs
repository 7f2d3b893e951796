//! Discrete versions of the energy, entropy and dissipation functionals and
//! of the inequalities that bound them along solutions.
//!
//! Quadrature conventions: cell integrands use the midpoint rule; node
//! integrands are averaged onto cells, which is the trapezoid rule over the
//! nodes. Derivatives of cell fields live at nodes (ghosts supply the end
//! values), derivatives of node fields live at cells.

mod checks;
mod probe;
mod roots;

pub use checks::{
    measure_bound, measure_bound_check, plus_part_norm, sobolev_check, window_average_check,
    MeasureCheck, PlusPartDirection, SobolevReport, WindowReport,
};
pub use probe::{reconstruct_profile, reconstruct_v, ProbeHistory, ProbeSnapshot};
pub use roots::entropy_roots;

use serde::Serialize;

use crate::domain::{apply_boundary, Grid, Params, ProblemType, State};
use crate::error::Result;
use crate::solver::{dx_cell_to_node, dx_node_to_cell, trapezoid};

/// One time-stamped record of every harness functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub t: f64,
    /// `int (cv theta + (u^2 + |w|^2 + v |b|^2) / 2) dx`.
    pub e_total: f64,
    /// `int ((u^2 + |w|^2 + v |b|^2) / 2 + (v - ln v - 1) + (theta - ln theta - 1)) dx`.
    pub g_entropy: f64,
    /// `int (theta_x^2 / (v theta^2) + (u_x^2 + |w_x|^2 + |b_x|^2) / (v theta)) dx`.
    pub w_dissipation: f64,
    pub v_func: f64,
    pub v_tilde: f64,
    /// `1 + max v`.
    pub m_v: f64,
    pub min_v: f64,
    pub min_theta: f64,
    pub max_theta: f64,
    /// `|(theta < 1/2)|`.
    pub measure_lo: f64,
    /// `|(theta > 2)|`.
    pub measure_hi: f64,
    pub h1_v: f64,
    pub h1_u: f64,
    pub h1_theta: f64,
    pub h1_b: f64,
    pub h1_w: f64,
    pub l2dx_v: f64,
    pub l2dx_u: f64,
    pub l2dx_theta: f64,
    pub l2dx_b: f64,
    pub l2dx_w: f64,
    /// `int u (ln v)_x dx - int (theta - 1) ln v dx`.
    pub b_cross: f64,
}

/// Column names of [`LyapunovReport`], in serialisation order.
pub const REPORT_COLUMNS: [&str; 23] = [
    "t",
    "e_total",
    "g_entropy",
    "w_dissipation",
    "v_func",
    "v_tilde",
    "m_v",
    "min_v",
    "min_theta",
    "max_theta",
    "measure_lo",
    "measure_hi",
    "h1_v",
    "h1_u",
    "h1_theta",
    "h1_b",
    "h1_w",
    "l2dx_v",
    "l2dx_u",
    "l2dx_theta",
    "l2dx_b",
    "l2dx_w",
    "b_cross",
];

impl LyapunovReport {
    /// Values in [`REPORT_COLUMNS`] order.
    pub fn values(&self) -> [f64; 23] {
        [
            self.t,
            self.e_total,
            self.g_entropy,
            self.w_dissipation,
            self.v_func,
            self.v_tilde,
            self.m_v,
            self.min_v,
            self.min_theta,
            self.max_theta,
            self.measure_lo,
            self.measure_hi,
            self.h1_v,
            self.h1_u,
            self.h1_theta,
            self.h1_b,
            self.h1_w,
            self.l2dx_v,
            self.l2dx_u,
            self.l2dx_theta,
            self.l2dx_b,
            self.l2dx_w,
            self.b_cross,
        ]
    }
}

fn kinetic_magnetic(state: &State, dx: f64) -> f64 {
    let cells: f64 = (0..state.n_cells())
        .map(|i| 0.5 * state.v[i] * (state.b[0][i].powi(2) + state.b[1][i].powi(2)))
        .sum::<f64>()
        * dx;
    let nodes: Vec<f64> = (0..state.u.len())
        .map(|j| 0.5 * (state.u[j].powi(2) + state.w[0][j].powi(2) + state.w[1][j].powi(2)))
        .collect();
    cells + trapezoid(&nodes, dx)
}

/// `int (cv theta + (u^2 + |w|^2 + v |b|^2) / 2) dx`, far-field background
/// included.
pub fn energy_total(state: &State, grid: &Grid, p: &Params) -> f64 {
    let internal: f64 = state.theta.iter().map(|th| p.cv * th).sum::<f64>() * grid.dx;
    internal + kinetic_magnetic(state, grid.dx)
}

#[inline]
fn relative_entropy(z: f64) -> f64 {
    z - z.ln() - 1.0
}

/// The entropy functional; vanishes exactly at the far-field state.
pub fn entropy_functional(state: &State, grid: &Grid) -> f64 {
    let thermo: f64 = state
        .v
        .iter()
        .zip(&state.theta)
        .map(|(&v, &th)| relative_entropy(v) + relative_entropy(th))
        .sum::<f64>()
        * grid.dx;
    thermo + kinetic_magnetic(state, grid.dx)
}

/// `e0 = 2 G(0)`.
pub fn e0(initial: &State, grid: &Grid) -> Result<f64> {
    initial.validate(grid)?;
    Ok(2.0 * entropy_functional(initial, grid))
}

fn l2_cells(f: impl Iterator<Item = f64>, dx: f64) -> f64 {
    f.map(|x| x * x).sum::<f64>() * dx
}

fn l2_nodes(f: &[f64], dx: f64) -> f64 {
    let sq: Vec<f64> = f.iter().map(|x| x * x).collect();
    trapezoid(&sq, dx)
}

/// Evaluates every functional on one state.
pub fn lyapunov_report(
    state: &State,
    grid: &Grid,
    problem: ProblemType,
    p: &Params,
) -> Result<LyapunovReport> {
    state.validate(grid)?;
    let n = grid.n_cells;
    let dx = grid.dx;
    let g = apply_boundary(state, problem);

    let v_bar: Vec<f64> = g.v.windows(2).map(|q| 0.5 * (q[0] + q[1])).collect();
    let th_bar: Vec<f64> = g.theta.windows(2).map(|q| 0.5 * (q[0] + q[1])).collect();

    // derivatives
    let vx = dx_cell_to_node(&g.v, dx);
    let thx = dx_cell_to_node(&g.theta, dx);
    let bx = [dx_cell_to_node(&g.b[0], dx), dx_cell_to_node(&g.b[1], dx)];
    let ln_v: Vec<f64> = g.v.iter().map(|v| v.ln()).collect();
    let lnvx = dx_cell_to_node(&ln_v, dx);
    let ux = dx_node_to_cell(&g.u, dx);
    let wx = [dx_node_to_cell(&g.w[0], dx), dx_node_to_cell(&g.w[1], dx)];

    let kin_mag = kinetic_magnetic(state, dx);
    let g_entropy = entropy_functional(state, grid);

    let cell_diss: f64 = (0..n)
        .map(|i| {
            (ux[i].powi(2) + wx[0][i].powi(2) + wx[1][i].powi(2)) / (state.v[i] * state.theta[i])
        })
        .sum::<f64>()
        * dx;
    let node_diss: Vec<f64> = (0..=n)
        .map(|j| {
            thx[j].powi(2) / (v_bar[j] * th_bar[j].powi(2))
                + (bx[0][j].powi(2) + bx[1][j].powi(2)) / (v_bar[j] * th_bar[j])
        })
        .collect();
    let w_dissipation = cell_diss + trapezoid(&node_diss, dx);

    let v_func = kin_mag + w_dissipation;
    let shear: f64 = (0..n)
        .map(|i| (wx[0][i].powi(2) + wx[1][i].powi(2)) / state.v[i])
        .sum::<f64>()
        * dx;
    let v_tilde = shear + v_func + 1.0;

    let min_v = state.v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_v = state.v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_theta = state.theta.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_theta = state.theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let measure_lo = state.theta.iter().filter(|&&th| th < 0.5).count() as f64 * dx;
    let measure_hi = state.theta.iter().filter(|&&th| th > 2.0).count() as f64 * dx;

    let sq_nodes = |f: &[f64]| l2_nodes(f, dx);
    let l2v = l2_cells(state.v.iter().map(|v| v - 1.0), dx);
    let l2th = l2_cells(state.theta.iter().map(|t| t - 1.0), dx);
    let l2b = l2_cells(state.b[0].iter().chain(&state.b[1]).cloned(), dx);
    let l2u = sq_nodes(&state.u);
    let l2w = sq_nodes(&state.w[0]) + sq_nodes(&state.w[1]);

    let dv = sq_nodes(&vx);
    let dth = sq_nodes(&thx);
    let db = sq_nodes(&bx[0]) + sq_nodes(&bx[1]);
    let du = l2_cells(ux.iter().cloned(), dx);
    let dw = l2_cells(wx[0].iter().chain(&wx[1]).cloned(), dx);

    let u_lnvx: Vec<f64> = (0..=n).map(|j| state.u[j] * lnvx[j]).collect();
    let b_cross = trapezoid(&u_lnvx, dx)
        - (0..n)
            .map(|i| (state.theta[i] - 1.0) * state.v[i].ln())
            .sum::<f64>()
            * dx;

    Ok(LyapunovReport {
        t: state.t,
        e_total: energy_total(state, grid, p),
        g_entropy,
        w_dissipation,
        v_func,
        v_tilde,
        m_v: 1.0 + max_v,
        min_v,
        min_theta,
        max_theta,
        measure_lo,
        measure_hi,
        h1_v: (l2v + dv).sqrt(),
        h1_u: (l2u + du).sqrt(),
        h1_theta: (l2th + dth).sqrt(),
        h1_b: (l2b + db).sqrt(),
        h1_w: (l2w + dw).sqrt(),
        l2dx_v: dv.sqrt(),
        l2dx_u: du.sqrt(),
        l2dx_theta: dth.sqrt(),
        l2dx_b: db.sqrt(),
        l2dx_w: dw.sqrt(),
        b_cross,
    })
}
