//! Probe histories and the representation formula for `v`.
//!
//! For a probe node `N`,
//!
//! ```text
//! B_N(x,t) = v0(x) exp( int_N^x u(y,t) dy - int_N^x u0(y) dy )
//! Y_N(t)   = exp( int_0^t sigma(N,s) ds )
//! v(x,t)   = B_N Y_N ( 1 + int_0^t (theta + v |b|^2 / 2) / (B_N Y_N) ds )
//! ```
//!
//! Prefix integrals use the trapezoid rule in space and the time integrals
//! use the trapezoid rule over every solver step.

use crate::constitutive::{sigma_unchecked, PointThermo};
use crate::domain::{Grid, Params, State};
use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Probe data stored at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSnapshot {
    pub t: f64,
    /// `int_0^t sigma(N, s) ds`.
    pub log_y: f64,
    /// `int_N^{x_i} u(y, t) dy` at every cell centre.
    pub prefix: Vec<f64>,
    /// `int_0^t (theta + v |b|^2 / 2) / (B_N Y_N) ds` at every cell centre.
    pub accum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeHistory {
    pub coordinate: f64,
    pub node: usize,
    /// Every step time, starting at the initial time.
    pub times: Vec<f64>,
    /// `sigma(N, t)` at every step time.
    pub sigma: Vec<f64>,
    /// Aligned with the trajectory's records.
    pub snapshots: Vec<ProbeSnapshot>,
    dx: f64,
    v0: Vec<f64>,
    log_y: f64,
    accum: Vec<f64>,
    integrand: Vec<f64>,
}

/// `sigma` at node `j`: mean of the adjacent cells' values.
fn sigma_at_node(state: &State, j: usize, dx: f64, p: &Params) -> f64 {
    let n = state.n_cells();
    let at_cell = |i: usize| {
        let v = state.v[i];
        let pt = PointThermo {
            v,
            theta: state.theta[i],
            b: [state.b[0][i], state.b[1][i]],
            ux_over_v: (state.u[i + 1] - state.u[i]) / (dx * v),
        };
        sigma_unchecked(&pt, p)
    };
    if j == 0 {
        at_cell(0)
    } else if j == n {
        at_cell(n - 1)
    } else {
        0.5 * (at_cell(j - 1) + at_cell(j))
    }
}

/// `int_{x_N}^{x_i} u dy` for every cell centre `x_i`.
fn prefix_integrals(u: &[f64], node: usize, dx: f64) -> Vec<f64> {
    let n = u.len() - 1;
    let mut at_node = vec![0.0; n + 1];
    for j in 0..n {
        at_node[j + 1] = at_node[j] + 0.5 * dx * (u[j] + u[j + 1]);
    }
    let base = at_node[node];
    (0..n)
        .map(|i| {
            let centre = 0.5 * (u[i] + u[i + 1]);
            at_node[i] + 0.25 * dx * (u[i] + centre) - base
        })
        .collect()
}

impl ProbeHistory {
    /// The probe node is the node nearest `floor(coordinate)`.
    pub fn new(coordinate: f64, grid: &Grid, initial: &State, p: &Params) -> Self {
        let node = grid.nearest_node(coordinate.floor());
        let dx = grid.dx;
        let sigma0 = sigma_at_node(initial, node, dx, p);
        let prefix = prefix_integrals(&initial.u, node, dx);
        let n = grid.n_cells;
        // B_N = v0 and Y_N = 1 at t = 0
        let integrand: Vec<f64> = (0..n)
            .map(|i| q_of(initial, i) / initial.v[i])
            .collect();
        ProbeHistory {
            coordinate,
            node,
            times: vec![initial.t],
            sigma: vec![sigma0],
            snapshots: vec![ProbeSnapshot {
                t: initial.t,
                log_y: 0.0,
                prefix,
                accum: vec![0.0; n],
            }],
            dx,
            v0: initial.v.clone(),
            log_y: 0.0,
            accum: vec![0.0; n],
            integrand,
        }
    }

    /// Advances the time quadratures to `state.t`; stores a snapshot when
    /// `record` is set.
    pub fn advance(&mut self, state: &State, p: &Params, record: bool) {
        let dt = state.t - self.times.last().copied().unwrap_or(0.0);
        let sigma = sigma_at_node(state, self.node, self.dx, p);
        self.log_y += 0.5 * dt * (self.sigma.last().copied().unwrap_or(sigma) + sigma);
        self.times.push(state.t);
        self.sigma.push(sigma);

        let prefix = prefix_integrals(&state.u, self.node, self.dx);
        let prefix0 = &self.snapshots[0].prefix;
        let y = self.log_y.exp();
        for i in 0..self.accum.len() {
            let b_n = self.v0[i] * (prefix[i] - prefix0[i]).exp();
            let g = q_of(state, i) / (b_n * y);
            self.accum[i] += 0.5 * dt * (self.integrand[i] + g);
            self.integrand[i] = g;
        }
        if record {
            self.snapshots.push(ProbeSnapshot {
                t: state.t,
                log_y: self.log_y,
                prefix,
                accum: self.accum.clone(),
            });
        }
    }

    /// `v0` at every cell.
    pub fn initial_volume(&self) -> &[f64] {
        &self.v0
    }
}

#[inline]
fn q_of(state: &State, i: usize) -> f64 {
    state.theta[i] + 0.5 * state.v[i] * (state.b[0][i].powi(2) + state.b[1][i].powi(2))
}

/// Reconstructed `v` at every cell for snapshot `k` of `history`.
pub fn reconstruct_profile(history: &ProbeHistory, k: usize) -> Vec<f64> {
    let snap = &history.snapshots[k];
    let prefix0 = &history.snapshots[0].prefix;
    let y = snap.log_y.exp();
    (0..snap.prefix.len())
        .map(|i| {
            let b_n = history.v0[i] * (snap.prefix[i] - prefix0[i]).exp();
            b_n * y * (1.0 + snap.accum[i])
        })
        .collect()
}

/// Reconstructed `v(x, t)` from the probe at `probe`; `t` must be one of the
/// recorded times and `x` selects the cell containing it.
pub fn reconstruct_v(
    trajectory: &Trajectory,
    grid: &Grid,
    probe: f64,
    x: f64,
    t: f64,
) -> Result<f64> {
    let history = trajectory
        .probes
        .iter()
        .find(|h| (h.coordinate - probe).abs() <= 1e-12 * probe.abs().max(1.0))
        .ok_or(Error::MissingProbe(probe))?;
    let tol = 1e-9 * t.abs().max(1.0);
    let k = history
        .snapshots
        .iter()
        .position(|s| (s.t - t).abs() <= tol)
        .ok_or_else(|| Error::InvalidArgument(format!("t = {t} is not a recorded time")))?;
    let i = grid.cell_containing(x);
    Ok(reconstruct_profile(history, k)[i])
}
