//! Staggered finite-difference discretisation and time integration.

mod diffusion;
mod ops;
mod run;
mod step;

pub use diffusion::{diffusion_solve, diffusion_solve_from, diffusion_solve_weighted, thomas};
pub use ops::{dx_cell_to_node, dx_node_to_cell, harmonic_mean};
pub(crate) use ops::trapezoid;
pub use run::{run, run_forced, truncation_check, Trajectory, TruncationWarning};
pub use step::{
    advective_bound, boundary_energy_flux, dt_control, step, step_with_dt, update_volume,
    Forcing, Sources, StepReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Tridiagonal implicit diffusion, explicit pressure and field coupling.
    SemiImplicit,
    /// Forward Euler on every term; reference for cross-checks.
    ExplicitOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub dt_max: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    /// Smallest admitted value of `v` and `theta`.
    pub positivity_floor: f64,
    /// Store a state every this many steps (the final state is always kept).
    pub record_stride: usize,
    /// When false, the magnetic and transverse terms are compiled out and
    /// the scheme is the compressible Navier-Stokes one; `b` and `w` are
    /// carried unchanged.
    pub magnetic: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            dt_max: 1e-2,
            cfl: 0.5,
            t_end: 1.0,
            integrator: Integrator::SemiImplicit,
            positivity_floor: 1e-10,
            record_stride: 1,
            magnetic: true,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParam { name, reason });
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl", format!("must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return bad("dt_max", format!("must be > 0, got {}", self.dt_max));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("must be > 0, got {}", self.t_end));
        }
        if !(self.positivity_floor >= 0.0 && self.positivity_floor.is_finite()) {
            return bad(
                "positivity_floor",
                format!("must be >= 0, got {}", self.positivity_floor),
            );
        }
        if self.record_stride == 0 {
            return bad("record_stride", "must be >= 1".into());
        }
        Ok(())
    }
}
