//! Pointwise-in-time checks of the a priori inequalities.

use serde::Serialize;

use crate::domain::{Grid, State};
use crate::error::{Error, Result};

use super::{entropy_roots, LyapunovReport};

/// Absolute slack on window-mean membership; covers the root finder's
/// round-off when a mean sits exactly on a root.
const WINDOW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowReport {
    /// Left end `N` of the window `[N, N + 1]`.
    pub left: f64,
    pub v_mean: f64,
    pub theta_mean: f64,
    pub v_in_range: bool,
    pub theta_in_range: bool,
}

/// Integral of a piecewise-constant cell field over `[a, b]`.
fn cell_integral(values: &[f64], grid: &Grid, a: f64, b: f64) -> f64 {
    let x0 = grid.x_left();
    let dx = grid.dx;
    let first = grid.cell_containing(a);
    let last = grid.cell_containing(b);
    (first..=last)
        .map(|i| {
            let lo = (x0 + i as f64 * dx).max(a);
            let hi = (x0 + (i + 1) as f64 * dx).min(b);
            values[i] * (hi - lo).max(0.0)
        })
        .sum()
}

/// Means of `v` and `theta` over every integer unit window inside the mesh,
/// flagged against the roots of `z - ln z - 1 = e0`.
pub fn window_average_check(state: &State, grid: &Grid, e0: f64) -> Result<Vec<WindowReport>> {
    let eps = 1e-9 * grid.dx;
    let first = (grid.x_left() - eps).ceil();
    let last = (grid.x_right() + eps).floor() - 1.0;
    if last < first {
        return Err(Error::WindowTooShort);
    }
    let (a1, a2) = entropy_roots(e0);
    let inside = |m: f64| m >= a1 - WINDOW_TOL && m <= a2 + WINDOW_TOL;
    let count = (last - first) as usize + 1;
    Ok((0..count)
        .map(|k| {
            let left = first + k as f64;
            let v_mean = cell_integral(&state.v, grid, left, left + 1.0);
            let theta_mean = cell_integral(&state.theta, grid, left, left + 1.0);
            WindowReport {
                left,
                v_mean,
                theta_mean,
                v_in_range: inside(v_mean),
                theta_in_range: inside(theta_mean),
            }
        })
        .collect())
}

/// `2 e0 / (2 ln 2 - 1)`.
pub fn measure_bound(e0: f64) -> f64 {
    2.0 * e0 / (2.0 * std::f64::consts::LN_2 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureCheck {
    pub measure: f64,
    pub bound: f64,
    /// `bound - measure`; negative on failure.
    pub slack: f64,
    pub pass: bool,
}

/// `|(theta < 1/2)| + |(theta > 2)| <= 2 e0 / (2 ln 2 - 1)`.
pub fn measure_bound_check(report: &LyapunovReport, e0: f64) -> MeasureCheck {
    let measure = report.measure_lo + report.measure_hi;
    let bound = measure_bound(e0);
    MeasureCheck {
        measure,
        bound,
        slack: bound - measure,
        pass: measure <= bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlusPartDirection {
    /// `(f - c)_+`
    Above,
    /// `(1/f - c)_+`
    BelowReciprocal,
}

/// Discrete `L^p` norm of `(f - c)_+` or `(1/f - c)_+` over cells of width
/// `dx`. `p = inf` gives the maximum.
pub fn plus_part_norm(
    values: &[f64],
    dx: f64,
    threshold: f64,
    p: f64,
    direction: PlusPartDirection,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must be >= 1, got {p}")));
    }
    let mut parts = Vec::with_capacity(values.len());
    for &f in values {
        let g = match direction {
            PlusPartDirection::Above => f - threshold,
            PlusPartDirection::BelowReciprocal => {
                if !(f > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "reciprocal plus-part needs a positive field, found {f}"
                    )));
                }
                1.0 / f - threshold
            }
        };
        parts.push(g.max(0.0));
    }
    if p.is_infinite() {
        return Ok(parts.into_iter().fold(0.0, f64::max));
    }
    let sum: f64 = parts.iter().map(|g| g.powf(p)).sum::<f64>() * dx;
    Ok(sum.powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevReport {
    pub sup_sq: f64,
    /// `2 ||f|| ||f_x||`.
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Checks `sup f^2 <= 2 ||f||_2 ||f_x||_2` for a sampled perturbation.
///
/// `far_ends` marks which ends continue to the zero far field; the
/// difference to that zero is part of `f_x` there. The discrete inequality
/// holds exactly whenever one end is far field; `slack = dx sup|f| sup|f_x|`
/// absorbs quadrature differences.
pub fn sobolev_check(values: &[f64], dx: f64, far_ends: [bool; 2]) -> SobolevReport {
    let n = values.len();
    let sup = values.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let l2 = (values.iter().map(|f| f * f).sum::<f64>() * dx).sqrt();
    let mut diffs: Vec<f64> = values.windows(2).map(|p| (p[1] - p[0]) / dx).collect();
    if n > 0 {
        if far_ends[0] {
            diffs.push(values[0] / dx);
        }
        if far_ends[1] {
            diffs.push(-values[n - 1] / dx);
        }
    }
    let sup_dx = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let l2_dx = (diffs.iter().map(|d| d * d).sum::<f64>() * dx).sqrt();
    let bound = 2.0 * l2 * l2_dx;
    let slack = dx * sup * sup_dx;
    let sup_sq = sup * sup;
    SobolevReport {
        sup_sq,
        bound,
        slack,
        pass: sup_sq <= bound * (1.0 + 1e-6) + slack,
    }
}
