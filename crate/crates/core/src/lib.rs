//! Planar compressible magnetohydrodynamics in Lagrangian mass coordinates,
//! with a harness for the energy, entropy and volume estimates.

pub mod constitutive;
pub mod domain;
pub mod error;
pub mod functionals;
pub mod solver;
pub mod verify;

pub use domain::{
    make_grid, make_state, DomainKind, FieldPoint, GaussianBundle, Grid, InitialProfile, Params,
    ProblemType, State,
};
pub use error::{Error, Field, Result};
pub use solver::{run, Integrator, SchemeConfig, Trajectory};
