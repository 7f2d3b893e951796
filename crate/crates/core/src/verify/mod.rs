//! Manufactured-solution convergence studies and equilibrium soaks.

mod mms;

pub use mms::{mms_sources, mms_target, ManufacturedCase, MmsForcing, SMOOTH_WIDTH};

use serde::Serialize;

use crate::domain::{make_grid, make_state, DomainKind, Grid, Params, ProblemType, State};
use crate::error::{Error, Result};
use crate::solver::{dt_control, step_with_dt, Integrator, SchemeConfig};

/// Field order used by every per-field array in this module.
pub const FIELD_NAMES: [&str; 5] = ["v", "u", "theta", "w", "b"];

/// Errors below this are treated as exact.
const EXACT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsSetup {
    pub case: ManufacturedCase,
    pub params: Params,
    /// The case is run on `[-half_width, half_width]` with far-field ends.
    pub half_width: f64,
    pub t_end: f64,
    /// `dt = dt_factor * dx^2`, rounded down to divide `t_end` evenly.
    pub dt_factor: f64,
    pub integrator: Integrator,
}

impl Default for MmsSetup {
    fn default() -> Self {
        MmsSetup {
            case: ManufacturedCase::Smooth,
            params: Params::default(),
            half_width: 8.0,
            t_end: 0.5,
            dt_factor: 0.25,
            integrator: Integrator::SemiImplicit,
        }
    }
}

impl MmsSetup {
    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParam { name, reason });
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return bad("half_width", format!("must be > 0, got {}", self.half_width));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("must be > 0, got {}", self.t_end));
        }
        if !(self.dt_factor > 0.0 && self.dt_factor.is_finite()) {
            return bad("dt_factor", format!("must be > 0, got {}", self.dt_factor));
        }
        Ok(())
    }

    fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            t_end: self.t_end,
            integrator: self.integrator,
            positivity_floor: 0.0,
            ..SchemeConfig::default()
        }
    }
}

/// Discrete L2 errors against the targets on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelErrors {
    pub n_cells: usize,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// In [`FIELD_NAMES`] order.
    pub errors: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub case: ManufacturedCase,
    pub levels: Vec<LevelErrors>,
    /// `orders[k]` compares levels `k` and `k + 1`; `None` where both
    /// errors are exact.
    pub orders: Vec<[Option<f64>; 5]>,
}

impl ConvergenceTable {
    /// True when every error at every level is below round-off.
    pub fn exact(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.errors.iter().all(|&e| e <= EXACT_TOL))
    }

    /// Orders of the finest pair of levels.
    pub fn finest_orders(&self) -> Option<[Option<f64>; 5]> {
        self.orders.last().copied()
    }

    /// Exact, or every finest-pair order at least `threshold`.
    pub fn meets(&self, threshold: f64) -> bool {
        if self.exact() {
            return true;
        }
        match self.finest_orders() {
            Some(o) => o.iter().all(|x| x.is_none_or(|x| x >= threshold)),
            None => false,
        }
    }
}

/// Initial state sampled from the targets at `t = 0`.
pub fn mms_initial(case: ManufacturedCase, grid: &Grid) -> Result<State> {
    make_state(grid, ProblemType::Cauchy, &|x: f64| mms_target(case, x, 0.0))
}

/// L2 norm over cells and over nodes by the trapezoid rule.
fn l2_cells(e: impl Iterator<Item = f64>, dx: f64) -> f64 {
    (e.map(|x| x * x).sum::<f64>() * dx).sqrt()
}

fn l2_nodes(e: &[f64], dx: f64) -> f64 {
    let n = e.len() - 1;
    let inner: f64 = e[1..n].iter().map(|x| x * x).sum();
    ((inner + 0.5 * (e[0] * e[0] + e[n] * e[n])) * dx).sqrt()
}

/// Errors of `state` against the targets at `state.t`.
pub fn target_errors(case: ManufacturedCase, state: &State, grid: &Grid) -> [f64; 5] {
    let dx = grid.dx;
    let cells: Vec<_> = grid
        .cell_centers
        .iter()
        .map(|&x| mms_target(case, x, state.t))
        .collect();
    let nodes: Vec<_> = grid
        .node_positions
        .iter()
        .map(|&x| mms_target(case, x, state.t))
        .collect();
    let ev = l2_cells(cells.iter().zip(&state.v).map(|(c, s)| s - c.v), dx);
    let eth = l2_cells(cells.iter().zip(&state.theta).map(|(c, s)| s - c.theta), dx);
    let eb = l2_cells(
        (0..grid.n_cells).map(|i| {
            (state.b[0][i] - cells[i].b[0]).hypot(state.b[1][i] - cells[i].b[1])
        }),
        dx,
    );
    let eu: Vec<f64> = nodes.iter().zip(&state.u).map(|(c, s)| s - c.u).collect();
    let ew: Vec<f64> = (0..grid.n_nodes())
        .map(|j| (state.w[0][j] - nodes[j].w[0]).hypot(state.w[1][j] - nodes[j].w[1]))
        .collect();
    [ev, l2_nodes(&eu, dx), eth, l2_nodes(&ew, dx), eb]
}

/// Runs the forced problem to `setup.t_end` with `steps` equal steps.
fn forced_run(setup: &MmsSetup, grid: &Grid, steps: usize) -> Result<State> {
    let forcing = MmsForcing {
        case: setup.case,
        params: setup.params,
    };
    let scheme = setup.scheme();
    let dt = setup.t_end / steps as f64;
    let mut state = mms_initial(setup.case, grid)?;
    for k in 0..steps {
        let (mut next, _) = step_with_dt(
            &state,
            grid,
            ProblemType::Cauchy,
            &setup.params,
            &scheme,
            dt,
            Some(&forcing),
        )?;
        // avoid accumulating round-off in the clock
        next.t = (k + 1) as f64 * dt;
        state = next;
    }
    state.t = setup.t_end;
    Ok(state)
}

fn steps_for(setup: &MmsSetup, dx: f64) -> usize {
    (setup.t_end / (setup.dt_factor * dx * dx)).ceil().max(1.0) as usize
}

fn level(setup: &MmsSetup, n: usize) -> Result<LevelErrors> {
    let grid = make_grid(DomainKind::FullLine, setup.half_width, n)?;
    let steps = steps_for(setup, grid.dx);
    let end = forced_run(setup, &grid, steps)?;
    Ok(LevelErrors {
        n_cells: n,
        dx: grid.dx,
        dt: setup.t_end / steps as f64,
        steps,
        errors: target_errors(setup.case, &end, &grid),
    })
}

fn order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse <= EXACT_TOL && fine <= EXACT_TOL {
        None
    } else {
        Some((coarse / fine).log2())
    }
}

/// Observed orders on nested grids of `grids[k]` cells, where each entry
/// doubles the previous one; levels run concurrently.
pub fn convergence_order(grids: &[usize], setup: &MmsSetup) -> Result<ConvergenceTable> {
    setup.validate()?;
    if grids.len() < 2 {
        return Err(Error::InvalidGrid(
            "a convergence study needs at least two grids".into(),
        ));
    }
    for pair in grids.windows(2) {
        if pair[1] != 2 * pair[0] {
            return Err(Error::InvalidGrid(format!(
                "grids are not nested: {} cells followed by {}",
                pair[0], pair[1]
            )));
        }
    }
    let results: Vec<Result<LevelErrors>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grids
            .iter()
            .map(|&n| scope.spawn(move || level(setup, n)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence level panicked"))
            .collect()
    });
    let levels = results.into_iter().collect::<Result<Vec<_>>>()?;
    let orders = levels
        .windows(2)
        .map(|p| {
            let mut o = [None; 5];
            for (f, slot) in o.iter_mut().enumerate() {
                *slot = order(p[0].errors[f], p[1].errors[f]);
            }
            o
        })
        .collect();
    Ok(ConvergenceTable {
        case: setup.case,
        levels,
        orders,
    })
}

/// Temporal self-convergence at a fixed grid: runs with `steps`, `2 steps`,
/// ... and returns, per field, `log2` of the ratio of successive
/// differences for each consecutive triple.
pub fn temporal_order(
    setup: &MmsSetup,
    n_cells: usize,
    steps: usize,
    levels: usize,
) -> Result<Vec<[f64; 5]>> {
    setup.validate()?;
    if levels < 3 {
        return Err(Error::InvalidArgument(
            "temporal order needs at least three time levels".into(),
        ));
    }
    let grid = make_grid(DomainKind::FullLine, setup.half_width, n_cells)?;
    let runs = (0..levels)
        .map(|k| forced_run(setup, &grid, steps << k))
        .collect::<Result<Vec<_>>>()?;
    let diffs: Vec<[f64; 5]> = runs
        .windows(2)
        .map(|p| state_difference(&p[0], &p[1], &grid))
        .collect();
    Ok(diffs
        .windows(2)
        .map(|d| {
            let mut o = [0.0; 5];
            for f in 0..5 {
                o[f] = (d[0][f] / d[1][f]).log2();
            }
            o
        })
        .collect())
}

/// Per-field L2 differences between two states on the same grid.
pub fn state_difference(a: &State, b: &State, grid: &Grid) -> [f64; 5] {
    let dx = grid.dx;
    let cell = |x: &[f64], y: &[f64]| l2_cells(x.iter().zip(y).map(|(p, q)| p - q), dx);
    let node = |x: &[f64], y: &[f64]| {
        let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        l2_nodes(&d, dx)
    };
    let pair_cells = l2_cells(
        (0..grid.n_cells).map(|i| (a.b[0][i] - b.b[0][i]).hypot(a.b[1][i] - b.b[1][i])),
        dx,
    );
    let w = node(&a.w[0], &b.w[0]).hypot(node(&a.w[1], &b.w[1]));
    [
        cell(&a.v, &b.v),
        node(&a.u, &b.u),
        cell(&a.theta, &b.theta),
        w,
        pair_cells,
    ]
}

fn soak_scheme(scheme: &SchemeConfig) -> SchemeConfig {
    // the soak counts steps, so the clock never runs out
    SchemeConfig {
        t_end: f64::MAX,
        ..*scheme
    }
}

/// Runs the far-field state for `steps` steps and returns the largest
/// deviation from it seen over all fields and steps.
pub fn constant_state_soak(
    problem: ProblemType,
    grid: &Grid,
    steps: usize,
    params: &Params,
    scheme: &SchemeConfig,
) -> Result<f64> {
    problem.check_grid(grid)?;
    let scheme = soak_scheme(scheme);
    let mut state = State::far_field(grid);
    let mut drift: f64 = 0.0;
    for _ in 0..steps {
        let dt = dt_control(&state, grid, params, &scheme);
        state = step_with_dt(&state, grid, problem, params, &scheme, dt, None)?.0;
        drift = drift.max(state.max_far_field_deviation());
    }
    Ok(drift)
}

/// Quadratic energy of the deviation from the far field; non-increasing
/// along solutions of the linearised equations.
pub fn linearised_energy(state: &State, grid: &Grid, p: &Params) -> f64 {
    let dx = grid.dx;
    let cells: f64 = (0..grid.n_cells)
        .map(|i| {
            let dv = state.v[i] - 1.0;
            let dth = state.theta[i] - 1.0;
            p.r * dv * dv + p.cv * dth * dth + state.b[0][i].powi(2) + state.b[1][i].powi(2)
        })
        .sum();
    let kin: Vec<f64> = (0..grid.n_nodes())
        .map(|j| (state.u[j].powi(2) + state.w[0][j].powi(2) + state.w[1][j].powi(2)).sqrt())
        .collect();
    0.5 * (cells * dx + l2_nodes(&kin, dx).powi(2))
}

/// Far field plus `amplitude * sin^2` in `theta`, vanishing with its slope
/// at both ends of the grid.
pub fn seeded_state(problem: ProblemType, grid: &Grid, amplitude: f64) -> Result<State> {
    let (x0, len) = (grid.x_left(), grid.length());
    make_state(grid, problem, &|x: f64| {
        let s = (std::f64::consts::PI * (x - x0) / len).sin();
        crate::domain::FieldPoint {
            theta: 1.0 + amplitude * s * s,
            ..crate::domain::FieldPoint::FAR_FIELD
        }
    })
}

/// Runs a seeded far-field state `steps` steps and returns the linearised
/// energy after every step, starting with the initial value.
pub fn seeded_soak(
    problem: ProblemType,
    grid: &Grid,
    steps: usize,
    amplitude: f64,
    params: &Params,
    scheme: &SchemeConfig,
) -> Result<Vec<f64>> {
    let scheme = soak_scheme(scheme);
    let mut state = seeded_state(problem, grid, amplitude)?;
    let mut out = vec![linearised_energy(&state, grid, params)];
    for _ in 0..steps {
        let dt = dt_control(&state, grid, params, &scheme);
        state = step_with_dt(&state, grid, problem, params, &scheme, dt, None)?.0;
        out.push(linearised_energy(&state, grid, params));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REGIMES: [ProblemType; 3] = [
        ProblemType::Cauchy,
        ProblemType::DirichletTheta,
        ProblemType::NeumannTheta,
    ];

    fn grid_for(problem: ProblemType, n: usize) -> Grid {
        make_grid(problem.domain_kind(), 5.0, n).unwrap()
    }

    #[test]
    fn soak_zero_steps() {
        let g = grid_for(ProblemType::Cauchy, 20);
        let d = constant_state_soak(
            ProblemType::Cauchy,
            &g,
            0,
            &Params::default(),
            &SchemeConfig::default(),
        )
        .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn soak_is_exact_in_every_regime() {
        for problem in REGIMES {
            let g = grid_for(problem, 50);
            for integrator in [Integrator::SemiImplicit, Integrator::ExplicitOracle] {
                let scheme = SchemeConfig {
                    integrator,
                    ..Default::default()
                };
                let d = constant_state_soak(problem, &g, 200, &Params::default(), &scheme).unwrap();
                assert!(d <= 1e-12, "{problem:?} {integrator:?}: {d}");
            }
        }
    }

    #[test]
    fn seeded_soak_decays() {
        for problem in REGIMES {
            let g = grid_for(problem, 60);
            let e = seeded_soak(problem, &g, 300, 1e-6, &Params::default(), &SchemeConfig::default())
                .unwrap();
            for pair in e.windows(2) {
                assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{problem:?}: {pair:?}");
            }
            assert!(e[300] < e[0], "{problem:?}: {} -> {}", e[0], e[300]);
        }
    }

    #[test]
    fn far_field_case_is_exact() {
        let setup = MmsSetup {
            case: ManufacturedCase::FarField,
            t_end: 0.1,
            ..Default::default()
        };
        let t = convergence_order(&[20, 40, 80], &setup).unwrap();
        assert!(t.exact());
        assert!(t.meets(1.8));
        assert!(t.orders.iter().all(|o| o.iter().all(Option::is_none)));
    }

    #[test]
    fn rejects_non_nested_grids() {
        let setup = MmsSetup::default();
        assert!(matches!(
            convergence_order(&[20, 30, 60], &setup),
            Err(Error::InvalidGrid(_))
        ));
        assert!(convergence_order(&[20], &setup).is_err());
    }

    #[test]
    fn smooth_case_converges_at_second_order() {
        let setup = MmsSetup {
            t_end: 0.25,
            ..Default::default()
        };
        let t = convergence_order(&[50, 100, 200], &setup).unwrap();
        let o = t.finest_orders().unwrap();
        for (f, x) in o.iter().enumerate() {
            let x = x.unwrap();
            assert!(x >= 1.8, "{}: order {x} ({:?})", FIELD_NAMES[f], t.levels);
        }
    }

    #[test]
    fn explicit_oracle_converges_to_the_same_targets() {
        let base = MmsSetup {
            t_end: 0.25,
            ..Default::default()
        };
        let explicit = MmsSetup {
            integrator: Integrator::ExplicitOracle,
            ..base
        };
        let a = convergence_order(&[100, 200], &base).unwrap();
        let b = convergence_order(&[100, 200], &explicit).unwrap();
        for t in [&a, &b] {
            for x in t.finest_orders().unwrap() {
                assert!(x.unwrap() >= 1.7, "{t:?}");
            }
        }
        // both approach the targets and therefore each other
        let g = make_grid(DomainKind::FullLine, 8.0, 200).unwrap();
        let sa = forced_run(&base, &g, steps_for(&base, g.dx)).unwrap();
        let sb = forced_run(&explicit, &g, steps_for(&explicit, g.dx)).unwrap();
        let gap = state_difference(&sa, &sb, &g);
        let err = target_errors(base.case, &sa, &g);
        for f in 0..5 {
            assert!(gap[f] <= 2.0 * err[f] + 1e-12, "{}: {gap:?} vs {err:?}", FIELD_NAMES[f]);
        }
    }

    #[test]
    fn temporal_self_convergence_is_first_order() {
        let setup = MmsSetup {
            t_end: 0.2,
            ..Default::default()
        };
        let o = temporal_order(&setup, 100, 10, 4).unwrap();
        for x in o.last().unwrap() {
            assert!(*x >= 0.9, "{o:?}");
        }
    }
}
