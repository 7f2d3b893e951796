//! Time loop.

use serde::Serialize;

use crate::domain::{Grid, Params, ProblemType, State, FAR_THETA, FAR_V};
use crate::error::{Error, Field, Result};
use crate::functionals::ProbeHistory;

use super::step::{dt_control, step_with_dt, Forcing, StepReport};
use super::SchemeConfig;

/// Deviation of a field from the far-field state inside the buffer next
/// to an artificial boundary.
const TRUNCATION_TOL: f64 = 1e-8;
const BUFFER_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationWarning {
    pub t: f64,
    pub field: Field,
    pub x: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// States at `t = 0`, every `record_stride` steps, and at `t_end`.
    pub records: Vec<State>,
    /// One report per accepted step.
    pub reports: Vec<StepReport>,
    pub probes: Vec<ProbeHistory>,
    pub warnings: Vec<TruncationWarning>,
}

impl Trajectory {
    pub fn initial(&self) -> &State {
        &self.records[0]
    }

    pub fn last(&self) -> &State {
        self.records.last().expect("trajectory has at least one record")
    }
}

/// Largest far-field deviation inside the buffer of width `0.1 L` next to
/// each artificial boundary, if any exceeds `1e-8`.
pub fn truncation_check(state: &State, grid: &Grid) -> Option<TruncationWarning> {
    let buffer = BUFFER_FRACTION * grid.half_width;
    let near_artificial = |x: f64| {
        x >= grid.x_right() - buffer || (grid.left_is_far_field() && x <= grid.x_left() + buffer)
    };
    let mut worst: Option<TruncationWarning> = None;
    let mut consider = |field: Field, x: f64, dev: f64| {
        if dev > TRUNCATION_TOL && worst.is_none_or(|w| dev > w.deviation) {
            worst = Some(TruncationWarning {
                t: state.t,
                field,
                x,
                deviation: dev,
            });
        }
    };
    for (i, &x) in grid.cell_centers.iter().enumerate() {
        if near_artificial(x) {
            consider(Field::V, x, (state.v[i] - FAR_V).abs());
            consider(Field::Theta, x, (state.theta[i] - FAR_THETA).abs());
            consider(Field::B, x, state.b[0][i].hypot(state.b[1][i]));
        }
    }
    for (j, &x) in grid.node_positions.iter().enumerate() {
        if near_artificial(x) {
            consider(Field::U, x, state.u[j].abs());
            consider(Field::W, x, state.w[0][j].hypot(state.w[1][j]));
        }
    }
    worst
}

/// Advances `initial` to `scheme.t_end`, recording `sigma` at each probe
/// every step.
pub fn run(
    initial: &State,
    grid: &Grid,
    problem: ProblemType,
    params: &Params,
    scheme: &SchemeConfig,
    probes: &[f64],
) -> Result<Trajectory> {
    run_forced(initial, grid, problem, params, scheme, probes, None)
}

pub fn run_forced(
    initial: &State,
    grid: &Grid,
    problem: ProblemType,
    params: &Params,
    scheme: &SchemeConfig,
    probes: &[f64],
    forcing: Option<&dyn Forcing>,
) -> Result<Trajectory> {
    scheme.validate()?;
    params.validate()?;
    problem.check_grid(grid)?;
    initial.validate(grid)?;
    if initial.n_cells() != grid.n_cells {
        return Err(Error::InvalidArgument(format!(
            "state has {} cells, grid has {}",
            initial.n_cells(),
            grid.n_cells
        )));
    }

    let mut traj = Trajectory {
        records: vec![initial.clone()],
        reports: Vec::new(),
        probes: probes
            .iter()
            .map(|&x| ProbeHistory::new(x, grid, initial, params))
            .collect(),
        warnings: Vec::new(),
    };
    let mut warned = false;
    let mut note_truncation = |state: &State, traj: &mut Trajectory| {
        if warned {
            return;
        }
        if let Some(w) = truncation_check(state, grid) {
            log::warn!(
                "perturbation reached the truncation buffer: {} deviates by {:.3e} at x = {} (t = {})",
                w.field,
                w.deviation,
                w.x,
                w.t
            );
            traj.warnings.push(w);
            warned = true;
        }
    };
    note_truncation(initial, &mut traj);

    // relative guard against a round-off sliver of a final step
    let end_tol = 1e-12 * scheme.t_end.max(1.0);
    let mut state = initial.clone();
    let mut steps = 0usize;
    while scheme.t_end - state.t > end_tol {
        let dt = dt_control(&state, grid, params, scheme);
        let (mut next, mut report) =
            step_with_dt(&state, grid, problem, params, scheme, dt, forcing)?;
        let last = scheme.t_end - next.t <= end_tol;
        if last {
            next.t = scheme.t_end;
            report.t = scheme.t_end;
        }
        steps += 1;
        let record = last || steps % scheme.record_stride == 0;
        for probe in &mut traj.probes {
            probe.advance(&next, params, record);
        }
        note_truncation(&next, &mut traj);
        traj.reports.push(report);
        if record {
            traj.records.push(next.clone());
        }
        state = next;
    }
    Ok(traj)
}
