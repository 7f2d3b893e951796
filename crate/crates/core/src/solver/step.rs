//! One time step of the staggered scheme.
//!
//! Semi-implicit sub-step order: volume, momentum, transverse velocity,
//! magnetic field (advanced in `m = v b`), temperature. Every implicit solve
//! is a scalar tridiagonal system.

use serde::Serialize;

use crate::constitutive::{conductivity_unchecked, pressure_unchecked, viscosity_unchecked};
use crate::domain::{apply_boundary, cell_rules, pad, GhostRule, Ghosted, Grid, Params, ProblemType, State};
use crate::error::{Error, Field, Result};
use crate::functionals::energy_total;

use super::diffusion::diffusion_solve_from;
use super::ops::{dx_node_to_cell, harmonic_mean};
use super::{Integrator, SchemeConfig};

/// Per-equation source terms, used by manufactured solutions.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sources {
    pub v: f64,
    pub u: f64,
    pub w: [f64; 2],
    /// Source of the `v b` equation.
    pub m: [f64; 2],
    /// Source of the temperature equation in `cv theta_t + ...` form.
    pub theta: f64,
}

pub trait Forcing: Sync {
    fn sources(&self, x: f64, t: f64) -> Sources;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// Net energy flux into the domain through its two ends, per unit time.
    pub boundary_flux: f64,
    /// `E(t + dt) - E(t) - dt * boundary_flux`.
    pub energy_residual: f64,
    pub min_v: f64,
    pub min_theta: f64,
}

/// `v + dt * D_x u`, the exact discrete form of `v_t = u_x`.
pub fn update_volume(v: &[f64], u: &[f64], dt: f64, dx: f64) -> Vec<f64> {
    v.iter()
        .zip(u.windows(2))
        .map(|(vi, p)| vi + dt * (p[1] - p[0]) / dx)
        .collect()
}

fn check_floor(field: Field, values: &[f64], grid: &Grid, t: f64, floor: f64) -> Result<()> {
    for (i, &val) in values.iter().enumerate() {
        if !(val > floor) {
            return Err(Error::PositivityBreach {
                field,
                x: grid.cell_centers[i],
                t,
                value: val,
                floor,
            });
        }
    }
    Ok(())
}

fn with_time(err: Error, t: f64) -> Error {
    match err {
        Error::SolverBreakdown { reason, .. } => Error::SolverBreakdown { t, reason },
        other => other,
    }
}

/// Total pressure `P + |b|^2 / 2` on the padded cells.
fn total_pressure<const MAG: bool>(g: &Ghosted, p: &Params) -> Vec<f64> {
    (0..g.v.len())
        .map(|i| {
            let pr = pressure_unchecked(g.v[i], g.theta[i], p);
            if MAG {
                pr + 0.5 * (g.b[0][i] * g.b[0][i] + g.b[1][i] * g.b[1][i])
            } else {
                pr
            }
        })
        .collect()
}

/// `hm(kappa/v)` on every node of the padded cell arrays.
fn conduction_coeff(v: &[f64], theta: &[f64], p: &Params) -> Vec<f64> {
    let k_over_v: Vec<f64> = v
        .iter()
        .zip(theta)
        .map(|(&v, &th)| conductivity_unchecked(th, p) / v)
        .collect();
    k_over_v.windows(2).map(|q| harmonic_mean(q[0], q[1])).collect()
}

/// `nu * hm(1/v)` on every node of the padded cell array.
fn resistive_coeff(v: &[f64], p: &Params) -> Vec<f64> {
    v.windows(2).map(|q| p.nu * 2.0 / (q[0] + q[1])).collect()
}

/// Spreads a node quantity onto cells so that the cell sum equals the full
/// node sum: interior nodes split evenly, end nodes go to their only cell.
fn node_to_cell_share(q: &[f64]) -> Vec<f64> {
    let n = q.len() - 1;
    let mut out: Vec<f64> = q.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    out[0] += 0.5 * q[0];
    out[n - 1] += 0.5 * q[n];
    out
}

fn node_sources(
    grid: &Grid,
    forcing: Option<&dyn Forcing>,
    t: f64,
) -> Option<Vec<Sources>> {
    forcing.map(|f| grid.node_positions.iter().map(|&x| f.sources(x, t)).collect())
}

fn cell_sources(
    grid: &Grid,
    forcing: Option<&dyn Forcing>,
    t: f64,
) -> Option<Vec<Sources>> {
    forcing.map(|f| grid.cell_centers.iter().map(|&x| f.sources(x, t)).collect())
}

/// Energy flux of the total-energy equation evaluated at node `j`, oriented
/// in `+x`: conductive, viscous, resistive and work terms.
fn energy_flux_at(g: &Ghosted, j: usize, dx: f64, p: &Params) -> f64 {
    let n = g.v.len() - 2;
    let (l, r) = (j, j + 1);
    let (vl, vr) = (g.v[l], g.v[r]);
    let vbar = 0.5 * (vl + vr);
    let pbar = 0.5
        * (pressure_unchecked(vl, g.theta[l], p)
            + pressure_unchecked(vr, g.theta[r], p)
            + 0.5 * (g.b[0][l].powi(2) + g.b[1][l].powi(2) + g.b[0][r].powi(2) + g.b[1][r].powi(2)));
    let cond = harmonic_mean(
        conductivity_unchecked(g.theta[l], p) / vl,
        conductivity_unchecked(g.theta[r], p) / vr,
    ) * (g.theta[r] - g.theta[l])
        / dx;
    let nu_c = p.nu * 2.0 / (vl + vr);
    let mut magnetic = 0.0;
    let mut wb = 0.0;
    let cell = if j == 0 { 0 } else { (j - 1).min(n - 1) };
    let mut wwx = 0.0;
    for k in 0..2 {
        let bbar = 0.5 * (g.b[k][l] + g.b[k][r]);
        magnetic += nu_c * bbar * (g.b[k][r] - g.b[k][l]) / dx;
        wb += g.w[k][j] * bbar;
        wwx += g.w[k][j] * (g.w[k][cell + 1] - g.w[k][cell]) / dx;
    }
    let u = g.u[j];
    let ux = (g.u[cell + 1] - g.u[cell]) / dx;
    -u * pbar + wb + cond + viscosity_unchecked(vbar, p) * u * ux / vbar + p.lambda * wwx / vbar
        + magnetic
}

/// Net energy flux into the domain, `F(right) - F(left)`.
pub fn boundary_energy_flux(state: &State, grid: &Grid, problem: ProblemType, p: &Params) -> f64 {
    let g = apply_boundary(state, problem);
    energy_flux_at(&g, grid.n_cells, grid.dx, p) - energy_flux_at(&g, 0, grid.dx, p)
}

/// `cfl * dx / max_wave` with `max_wave = max sqrt((gamma P + |b|^2 + 1) / v)`,
/// covering the acoustic, magnetosonic and transverse (Alfven) speeds in
/// mass coordinates.
pub fn advective_bound(state: &State, grid: &Grid, p: &Params, cfl: f64) -> f64 {
    let gamma = 1.0 + p.r / p.cv;
    let max_wave = (0..state.n_cells())
        .map(|i| {
            let v = state.v[i];
            let b2 = state.b[0][i].powi(2) + state.b[1][i].powi(2);
            ((gamma * pressure_unchecked(v, state.theta[i], p) + b2 + 1.0) / v).sqrt()
        })
        .fold(0.0, f64::max);
    cfl * grid.dx / max_wave
}

/// Time step: the smallest of `dt_max`, the advective bound, a strain-rate
/// bound keeping `v` and the linearised work term positive, an explicit
/// diffusion bound (explicit integrator only), and the time left to `t_end`.
pub fn dt_control(state: &State, grid: &Grid, p: &Params, scheme: &SchemeConfig) -> f64 {
    let dx = grid.dx;
    let mut dt = scheme.dt_max.min(advective_bound(state, grid, p, scheme.cfl));

    let strain_scale = (p.cv / p.r).min(1.0);
    for (i, du) in dx_node_to_cell(&state.u, dx).iter().enumerate() {
        if *du != 0.0 {
            dt = dt.min(scheme.cfl * strain_scale * state.v[i] / du.abs());
        }
    }

    if scheme.integrator == Integrator::ExplicitOracle {
        let d_max = (0..state.n_cells())
            .map(|i| {
                let v = state.v[i];
                let mu = viscosity_unchecked(v, p) / v;
                let kappa = conductivity_unchecked(state.theta[i], p) / (p.cv * v);
                mu.max(kappa).max(p.lambda / v).max(p.nu / (v * v))
            })
            .fold(0.0, f64::max);
        dt = dt.min(scheme.cfl * dx * dx / (2.0 * d_max));
    }

    let remaining = scheme.t_end - state.t;
    dt.min(remaining)
}

/// One step with `dt` from [`dt_control`].
pub fn step(
    state: &State,
    grid: &Grid,
    problem: ProblemType,
    p: &Params,
    scheme: &SchemeConfig,
) -> Result<(State, StepReport)> {
    let dt = dt_control(state, grid, p, scheme);
    step_with_dt(state, grid, problem, p, scheme, dt, None)
}

/// One step of the configured integrator with a prescribed `dt` and
/// optional source terms.
pub fn step_with_dt(
    state: &State,
    grid: &Grid,
    problem: ProblemType,
    p: &Params,
    scheme: &SchemeConfig,
    dt: f64,
    forcing: Option<&dyn Forcing>,
) -> Result<(State, StepReport)> {
    let floor = scheme.positivity_floor;
    let next = match (scheme.integrator, scheme.magnetic) {
        (Integrator::SemiImplicit, true) => {
            semi_implicit::<true>(state, grid, problem, p, floor, dt, forcing)
        }
        (Integrator::SemiImplicit, false) => {
            semi_implicit::<false>(state, grid, problem, p, floor, dt, forcing)
        }
        (Integrator::ExplicitOracle, true) => {
            explicit::<true>(state, grid, problem, p, floor, dt, forcing)
        }
        (Integrator::ExplicitOracle, false) => {
            explicit::<false>(state, grid, problem, p, floor, dt, forcing)
        }
    }
    .map_err(|e| with_time(e, state.t + dt))?;

    let e0 = energy_total(state, grid, p);
    let e1 = energy_total(&next, grid, p);
    let flux = boundary_energy_flux(&next, grid, problem, p);
    let report = StepReport {
        t: next.t,
        dt,
        boundary_flux: flux,
        energy_residual: e1 - e0 - dt * flux,
        min_v: next.v.iter().cloned().fold(f64::INFINITY, f64::min),
        min_theta: next.theta.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    Ok((next, report))
}

fn semi_implicit<const MAG: bool>(
    s: &State,
    grid: &Grid,
    problem: ProblemType,
    p: &Params,
    floor: f64,
    dt: f64,
    forcing: Option<&dyn Forcing>,
) -> Result<State> {
    let n = grid.n_cells;
    let dx = grid.dx;
    let t1 = s.t + dt;
    let rules = cell_rules(problem);
    let g = apply_boundary(s, problem);
    let src_old = cell_sources(grid, forcing, s.t);
    let src_cells = cell_sources(grid, forcing, t1);
    let src_nodes = node_sources(grid, forcing, t1);

    // (a) volume
    let mut v_new = update_volume(&s.v, &g.u, dt, dx);
    if let Some(src) = &src_old {
        for (v, q) in v_new.iter_mut().zip(src) {
            *v += dt * q.v;
        }
    }
    check_floor(Field::V, &v_new, grid, t1, floor)?;
    let vg = pad(&v_new, rules.v);

    // (b) momentum: implicit viscosity, explicit total pressure
    let pi = total_pressure::<MAG>(&g, p);
    let visc: Vec<f64> = v_new
        .iter()
        .map(|&v| viscosity_unchecked(v, p) / v)
        .collect();
    let rhs_u: Vec<f64> = (1..n)
        .map(|j| {
            let mut r = g.u[j] - dt * (pi[j + 1] - pi[j]) / dx;
            if let Some(src) = &src_nodes {
                r += dt * src[j].u;
            }
            r
        })
        .collect();
    let wall = [GhostRule::clamp(0.0); 2];
    let ones = vec![1.0; n - 1];
    let u_in = diffusion_solve_from(&g.u[1..n], &ones, &visc, &rhs_u, dt, dx, wall)?;
    let mut u_new = Vec::with_capacity(n + 1);
    u_new.push(0.0);
    u_new.extend(u_in);
    u_new.push(0.0);

    let (w_new, b_new) = if MAG {
        // (c) transverse velocity: implicit shear viscosity, explicit b_x
        let lam: Vec<f64> = v_new.iter().map(|&v| p.lambda / v).collect();
        let mut w_new: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let rhs: Vec<f64> = (1..n)
                .map(|j| {
                    let mut r = g.w[k][j] + dt * (g.b[k][j + 1] - g.b[k][j]) / dx;
                    if let Some(src) = &src_nodes {
                        r += dt * src[j].w[k];
                    }
                    r
                })
                .collect();
            let inner = diffusion_solve_from(&g.w[k][1..n], &ones, &lam, &rhs, dt, dx, wall)?;
            let mut full = Vec::with_capacity(n + 1);
            full.push(0.0);
            full.extend(inner);
            full.push(0.0);
            w_new[k] = full;
        }

        // (d) m = v b with implicit resistivity, explicit w_x at the new level
        let res = resistive_coeff(&vg, p);
        let mut b_new: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let rhs: Vec<f64> = (0..n)
                .map(|i| {
                    let mut r = s.v[i] * s.b[k][i] + dt * (w_new[k][i + 1] - w_new[k][i]) / dx;
                    if let Some(src) = &src_cells {
                        r += dt * src[i].m[k];
                    }
                    r
                })
                .collect();
            b_new[k] = diffusion_solve_from(&s.b[k], &v_new, &res, &rhs, dt, dx, rules.b)?;
        }
        (w_new, b_new)
    } else {
        (s.w.clone(), s.b.clone())
    };

    // (e) temperature: implicit conduction, linearly implicit work term,
    // dissipation from the updated gradients
    let du = dx_node_to_cell(&u_new, dx);
    let cond = conduction_coeff(&vg, &g.theta, p);
    let mut heat: Vec<f64> = (0..n)
        .map(|i| viscosity_unchecked(v_new[i], p) * du[i] * du[i] / v_new[i])
        .collect();
    if MAG {
        for k in 0..2 {
            let dw = dx_node_to_cell(&w_new[k], dx);
            for i in 0..n {
                heat[i] += p.lambda * dw[i] * dw[i] / v_new[i];
            }
        }
        let bg = [pad(&b_new[0], rules.b), pad(&b_new[1], rules.b)];
        let res = resistive_coeff(&vg, p);
        let q: Vec<f64> = (0..=n)
            .map(|j| {
                let db0 = (bg[0][j + 1] - bg[0][j]) / dx;
                let db1 = (bg[1][j + 1] - bg[1][j]) / dx;
                res[j] * (db0 * db0 + db1 * db1)
            })
            .collect();
        for (h, s) in heat.iter_mut().zip(node_to_cell_share(&q)) {
            *h += s;
        }
    }
    let mut mass = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        let m = p.cv + dt * p.r * du[i] / v_new[i];
        if !(m > 0.0) {
            return Err(Error::SolverBreakdown {
                t: t1,
                reason: format!(
                    "expansion work made the temperature diagonal non-positive at x = {}",
                    grid.cell_centers[i]
                ),
            });
        }
        mass.push(m);
        let mut r = p.cv * s.theta[i] + dt * heat[i];
        if let Some(src) = &src_cells {
            r += dt * src[i].theta;
        }
        rhs.push(r);
    }
    let theta_new = diffusion_solve_from(&s.theta, &mass, &cond, &rhs, dt, dx, rules.theta)?;
    check_floor(Field::Theta, &theta_new, grid, t1, floor)?;

    Ok(State {
        t: t1,
        v: v_new,
        theta: theta_new,
        b: b_new,
        u: u_new,
        w: w_new,
    })
}

fn explicit<const MAG: bool>(
    s: &State,
    grid: &Grid,
    problem: ProblemType,
    p: &Params,
    floor: f64,
    dt: f64,
    forcing: Option<&dyn Forcing>,
) -> Result<State> {
    let n = grid.n_cells;
    let dx = grid.dx;
    let t1 = s.t + dt;
    let g = apply_boundary(s, problem);
    let src_cells = cell_sources(grid, forcing, s.t);
    let src_nodes = node_sources(grid, forcing, s.t);

    let mut v_new = update_volume(&s.v, &g.u, dt, dx);
    if let Some(src) = &src_cells {
        for (v, q) in v_new.iter_mut().zip(src) {
            *v += dt * q.v;
        }
    }
    check_floor(Field::V, &v_new, grid, t1, floor)?;

    let du = dx_node_to_cell(&g.u, dx);
    let pi = total_pressure::<MAG>(&g, p);
    let tau: Vec<f64> = (0..n)
        .map(|i| viscosity_unchecked(s.v[i], p) * du[i] / s.v[i])
        .collect();
    let mut u_new = vec![0.0; n + 1];
    for j in 1..n {
        let mut rate = -(pi[j + 1] - pi[j]) / dx + (tau[j] - tau[j - 1]) / dx;
        if let Some(src) = &src_nodes {
            rate += src[j].u;
        }
        u_new[j] = g.u[j] + dt * rate;
    }

    let mut heat: Vec<f64> = (0..n)
        .map(|i| viscosity_unchecked(s.v[i], p) * du[i] * du[i] / s.v[i])
        .collect();

    let (w_new, b_new) = if MAG {
        let mut w_new = [vec![0.0; n + 1], vec![0.0; n + 1]];
        let mut b_new = [vec![0.0; n], vec![0.0; n]];
        let res = resistive_coeff(&g.v, p);
        for k in 0..2 {
            let dw = dx_node_to_cell(&g.w[k], dx);
            for j in 1..n {
                let shear = p.lambda * (dw[j] / s.v[j] - dw[j - 1] / s.v[j - 1]) / dx;
                let mut rate = (g.b[k][j + 1] - g.b[k][j]) / dx + shear;
                if let Some(src) = &src_nodes {
                    rate += src[j].w[k];
                }
                w_new[k][j] = g.w[k][j] + dt * rate;
            }
            let flux: Vec<f64> = (0..=n)
                .map(|j| res[j] * (g.b[k][j + 1] - g.b[k][j]) / dx)
                .collect();
            let q: Vec<f64> = (0..=n)
                .map(|j| res[j] * ((g.b[k][j + 1] - g.b[k][j]) / dx).powi(2))
                .collect();
            for (h, sh) in heat.iter_mut().zip(node_to_cell_share(&q)) {
                *h += sh;
            }
            for i in 0..n {
                heat[i] += p.lambda * dw[i] * dw[i] / s.v[i];
                let mut rate = dw[i] + (flux[i + 1] - flux[i]) / dx;
                if let Some(src) = &src_cells {
                    rate += src[i].m[k];
                }
                b_new[k][i] = (s.v[i] * s.b[k][i] + dt * rate) / v_new[i];
            }
        }
        (w_new, b_new)
    } else {
        (s.w.clone(), s.b.clone())
    };

    let cond = conduction_coeff(&g.v, &g.theta, p);
    let theta_new: Vec<f64> = (0..n)
        .map(|i| {
            let qr = cond[i + 1] * (g.theta[i + 2] - g.theta[i + 1]) / dx;
            let ql = cond[i] * (g.theta[i + 1] - g.theta[i]) / dx;
            let mut rate = -p.r * s.theta[i] * du[i] / s.v[i] + (qr - ql) / dx + heat[i];
            if let Some(src) = &src_cells {
                rate += src[i].theta;
            }
            s.theta[i] + dt * rate / p.cv
        })
        .collect();
    check_floor(Field::Theta, &theta_new, grid, t1, floor)?;

    Ok(State {
        t: t1,
        v: v_new,
        theta: theta_new,
        b: b_new,
        u: u_new,
        w: w_new,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, make_state, DomainKind, GaussianBundle, InitialProfile};

    #[test]
    fn volume_update_with_unit_strain() {
        let g = make_grid(DomainKind::FullLine, 5.0, 10).unwrap();
        let u: Vec<f64> = g.node_positions.clone();
        let v = vec![1.0; 10];
        for vi in update_volume(&v, &u, 0.1, g.dx) {
            assert!((vi - 1.1).abs() < 1e-14);
        }
    }

    #[test]
    fn far_field_is_exact_equilibrium() {
        for problem in [
            ProblemType::Cauchy,
            ProblemType::DirichletTheta,
            ProblemType::NeumannTheta,
        ] {
            let g = make_grid(problem.domain_kind(), 5.0, 20).unwrap();
            let s = State::far_field(&g);
            for integrator in [Integrator::SemiImplicit, Integrator::ExplicitOracle] {
                let scheme = SchemeConfig {
                    integrator,
                    ..Default::default()
                };
                let (next, rep) = step(&s, &g, problem, &Params::default(), &scheme).unwrap();
                assert_eq!(next.v, s.v);
                assert_eq!(next.theta, s.theta);
                assert_eq!(next.u, s.u);
                assert_eq!(next.b, s.b);
                assert_eq!(next.w, s.w);
                assert_eq!(rep.boundary_flux, 0.0);
                assert_eq!(rep.energy_residual, 0.0);
            }
        }
    }

    #[test]
    fn dt_control_on_far_field() {
        let g = make_grid(DomainKind::FullLine, 10.0, 100).unwrap();
        let s = State::far_field(&g);
        let p = Params::default();
        let scheme = SchemeConfig::default();
        // sqrt(3) wave speed: 0.5 * 0.2 / sqrt(3) > 1e-2
        assert_eq!(dt_control(&s, &g, &p, &scheme), 1e-2);

        let coarse = make_grid(DomainKind::FullLine, 10.0, 50).unwrap();
        let a = advective_bound(&s, &g, &p, 0.5);
        let b = advective_bound(&State::far_field(&coarse), &coarse, &p, 0.5);
        assert!((b / a - 2.0).abs() < 1e-12);

        let late = State {
            t: scheme.t_end - 1e-5,
            ..s
        };
        assert!((dt_control(&late, &g, &p, &scheme) - 1e-5).abs() < 1e-15);
    }

    #[test]
    fn breach_is_an_error_not_a_clamp() {
        let g = make_grid(DomainKind::FullLine, 5.0, 50).unwrap();
        let s = make_state(
            &g,
            ProblemType::Cauchy,
            &InitialProfile::Gaussian(GaussianBundle {
                width: 1.0,
                theta: -0.3,
                ..Default::default()
            }),
        )
        .unwrap();
        let scheme = SchemeConfig {
            positivity_floor: 0.9,
            ..Default::default()
        };
        let err = step(&s, &g, ProblemType::Cauchy, &Params::default(), &scheme).unwrap_err();
        assert!(matches!(
            err,
            Error::PositivityBreach {
                field: Field::Theta,
                ..
            }
        ));
    }

    #[test]
    fn node_share_conserves_sum() {
        let q = [1.0, 2.0, 3.0, 4.0, 5.0];
        let cells = node_to_cell_share(&q);
        assert_eq!(cells.len(), 4);
        assert!((cells.iter().sum::<f64>() - 15.0).abs() < 1e-14);
    }
}
