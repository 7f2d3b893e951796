//! Material laws of a perfect, viscous, heat-conducting gas.
//!
//! The checked functions validate their arguments; the `*_unchecked`
//! variants are used inside the solver kernels where positivity is already
//! established.

use crate::domain::Params;
use crate::error::{Error, Field, Result};

/// Pointwise thermodynamic input to the effective stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointThermo {
    pub v: f64,
    pub theta: f64,
    pub b: [f64; 2],
    /// Strain rate `u_x / v`.
    pub ux_over_v: f64,
}

fn require_positive(field: Field, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            field,
            x: f64::NAN,
            value,
        })
    }
}

#[inline]
pub fn viscosity_unchecked(v: f64, p: &Params) -> f64 {
    if p.mu2 == 0.0 {
        p.mu1
    } else {
        p.mu1 + p.mu2 * v.powf(-p.alpha)
    }
}

/// `d mu / d v`.
#[inline]
pub fn viscosity_dv(v: f64, p: &Params) -> f64 {
    -p.alpha * p.mu2 * v.powf(-p.alpha - 1.0)
}

#[inline]
pub fn conductivity_unchecked(theta: f64, p: &Params) -> f64 {
    if p.beta == 0.0 {
        p.kappa0
    } else {
        p.kappa0 * theta.powf(p.beta)
    }
}

/// `d kappa / d theta`.
#[inline]
pub fn conductivity_dtheta(theta: f64, p: &Params) -> f64 {
    if p.beta == 0.0 {
        0.0
    } else {
        p.beta * p.kappa0 * theta.powf(p.beta - 1.0)
    }
}

#[inline]
pub fn pressure_unchecked(v: f64, theta: f64, p: &Params) -> f64 {
    p.r * theta / v
}

/// `mu = mu1 + mu2 * v^-alpha`.
pub fn viscosity_mu(v: f64, p: &Params) -> Result<f64> {
    require_positive(Field::V, v)?;
    Ok(viscosity_unchecked(v, p))
}

/// `kappa = kappa0 * theta^beta`.
pub fn conductivity_kappa(theta: f64, p: &Params) -> Result<f64> {
    require_positive(Field::Theta, theta)?;
    Ok(conductivity_unchecked(theta, p))
}

/// `P = R theta / v`.
pub fn pressure(v: f64, theta: f64, p: &Params) -> Result<f64> {
    require_positive(Field::V, v)?;
    require_positive(Field::Theta, theta)?;
    Ok(pressure_unchecked(v, theta, p))
}

/// `e = cv theta`; the additive constant is fixed to zero.
pub fn internal_energy(theta: f64, p: &Params) -> Result<f64> {
    require_positive(Field::Theta, theta)?;
    Ok(p.cv * theta)
}

#[inline]
pub fn sigma_unchecked(pt: &PointThermo, p: &Params) -> f64 {
    let b2 = pt.b[0] * pt.b[0] + pt.b[1] * pt.b[1];
    viscosity_unchecked(pt.v, p) * pt.ux_over_v - (pressure_unchecked(pt.v, pt.theta, p) + 0.5 * b2)
}

/// Effective stress `sigma = mu u_x / v - (P + |b|^2 / 2)`, so that the
/// momentum equation reads `u_t = sigma_x`.
pub fn effective_stress_sigma(pt: &PointThermo, p: &Params) -> Result<f64> {
    require_positive(Field::V, pt.v)?;
    require_positive(Field::Theta, pt.theta)?;
    Ok(sigma_unchecked(pt, p))
}
