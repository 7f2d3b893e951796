//! Manufactured solutions with hand-derived source terms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constitutive::{
    conductivity_dtheta, conductivity_unchecked, viscosity_dv, viscosity_unchecked,
};
use crate::domain::{FieldPoint, Params};
use crate::error::{Error, Result};
use crate::solver::{Forcing, Sources};

/// Width of the bump used by [`ManufacturedCase::Smooth`].
pub const SMOOTH_WIDTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManufacturedCase {
    /// The far-field constant state; every source vanishes.
    FarField,
    /// Gaussian-modulated targets with `v_t = u_x` built in.
    Smooth,
}

impl ManufacturedCase {
    pub fn name(self) -> &'static str {
        match self {
            ManufacturedCase::FarField => "far-field",
            ManufacturedCase::Smooth => "smooth",
        }
    }
}

impl fmt::Display for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ManufacturedCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "far-field" => Ok(ManufacturedCase::FarField),
            "smooth" => Ok(ManufacturedCase::Smooth),
            other => Err(Error::InvalidArgument(format!(
                "unknown manufactured case \"{other}\" (expected far-field or smooth)"
            ))),
        }
    }
}

/// Target fields and their first and second space derivatives and first
/// time derivatives at one point.
#[derive(Debug, Clone, Copy, Default)]
struct Jet {
    v: f64,
    v_x: f64,
    v_t: f64,
    u: f64,
    u_t: f64,
    u_x: f64,
    u_xx: f64,
    theta: f64,
    theta_t: f64,
    theta_x: f64,
    theta_xx: f64,
    w: [f64; 2],
    w_t: [f64; 2],
    w_x: [f64; 2],
    w_xx: [f64; 2],
    b: [f64; 2],
    b_t: [f64; 2],
    b_x: [f64; 2],
    b_xx: [f64; 2],
}

/// `exp(-(x/l)^2)` and its first three derivatives.
fn bump(x: f64) -> [f64; 4] {
    let l2 = SMOOTH_WIDTH * SMOOTH_WIDTH;
    let p = (-x * x / l2).exp();
    let p1 = -2.0 * x / l2 * p;
    let p2 = (4.0 * x * x / (l2 * l2) - 2.0 / l2) * p;
    let p3 = (-8.0 * x * x * x / (l2 * l2 * l2) + 12.0 * x / (l2 * l2)) * p;
    [p, p1, p2, p3]
}

fn smooth_jet(x: f64, t: f64) -> Jet {
    let [p, p1, p2, p3] = bump(x);
    let (s, c) = t.sin_cos();
    Jet {
        v: 1.0 + 0.3 * p + 0.2 * s * p2,
        v_x: 0.3 * p1 + 0.2 * s * p3,
        v_t: 0.2 * c * p2,
        u: 0.2 * c * p1,
        u_t: -0.2 * s * p1,
        u_x: 0.2 * c * p2,
        u_xx: 0.2 * c * p3,
        theta: 1.0 + 0.4 * (1.0 + 0.5 * s) * p,
        theta_t: 0.2 * c * p,
        theta_x: 0.4 * (1.0 + 0.5 * s) * p1,
        theta_xx: 0.4 * (1.0 + 0.5 * s) * p2,
        w: [0.2 * c * p, 0.2 * s * p1],
        w_t: [-0.2 * s * p, 0.2 * c * p1],
        w_x: [0.2 * c * p1, 0.2 * s * p2],
        w_xx: [0.2 * c * p2, 0.2 * s * p3],
        b: [0.3 * (1.0 + 0.5 * s) * p, 0.3 * c * p1],
        b_t: [0.15 * c * p, -0.3 * s * p1],
        b_x: [0.3 * (1.0 + 0.5 * s) * p1, 0.3 * c * p2],
        b_xx: [0.3 * (1.0 + 0.5 * s) * p2, 0.3 * c * p3],
    }
}

fn jet(case: ManufacturedCase, x: f64, t: f64) -> Jet {
    match case {
        ManufacturedCase::FarField => Jet {
            v: 1.0,
            theta: 1.0,
            ..Jet::default()
        },
        ManufacturedCase::Smooth => smooth_jet(x, t),
    }
}

/// Target fields at `(x, t)`.
pub fn mms_target(case: ManufacturedCase, x: f64, t: f64) -> FieldPoint {
    let j = jet(case, x, t);
    FieldPoint {
        v: j.v,
        u: j.u,
        w: j.w,
        b: j.b,
        theta: j.theta,
    }
}

/// Residuals of the five equations at the targets.
pub fn mms_sources(case: ManufacturedCase, x: f64, t: f64, p: &Params) -> Sources {
    if case == ManufacturedCase::FarField {
        return Sources::default();
    }
    let j = jet(case, x, t);
    let v = j.v;
    let mu = viscosity_unchecked(v, p);
    let dmu = viscosity_dv(v, p);
    let kappa = conductivity_unchecked(j.theta, p);
    let dkappa = conductivity_dtheta(j.theta, p);
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];

    let pressure_x = p.r * (j.theta_x / v - j.theta * j.v_x / (v * v));
    let viscous = dmu * j.v_x * j.u_x / v + mu * (j.u_xx / v - j.u_x * j.v_x / (v * v));
    let u = j.u_t + pressure_x + dot(j.b, j.b_x) - viscous;

    let mut w = [0.0; 2];
    let mut m = [0.0; 2];
    for k in 0..2 {
        w[k] = j.w_t[k]
            - j.b_x[k]
            - p.lambda * (j.w_xx[k] / v - j.w_x[k] * j.v_x / (v * v));
        m[k] = j.v_t * j.b[k] + v * j.b_t[k]
            - j.w_x[k]
            - p.nu * (j.b_xx[k] / v - j.b_x[k] * j.v_x / (v * v));
    }

    let conduction = dkappa * j.theta_x * j.theta_x / v
        + kappa * (j.theta_xx / v - j.theta_x * j.v_x / (v * v));
    let dissipation =
        (mu * j.u_x * j.u_x + p.lambda * dot(j.w_x, j.w_x) + p.nu * dot(j.b_x, j.b_x)) / v;
    let theta = p.cv * j.theta_t + p.r * j.theta * j.u_x / v - conduction - dissipation;

    Sources {
        v: j.v_t - j.u_x,
        u,
        w,
        m,
        theta,
    }
}

/// A manufactured case bound to a parameter set, usable as solver forcing.
#[derive(Debug, Clone, Copy)]
pub struct MmsForcing {
    pub case: ManufacturedCase,
    pub params: Params,
}

impl Forcing for MmsForcing {
    fn sources(&self, x: f64, t: f64) -> Sources {
        mms_sources(self.case, x, t, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Residuals from central differences of the targets alone.
    fn fd_residual(case: ManufacturedCase, x: f64, t: f64, p: &Params, h: f64) -> Sources {
        let f = |x: f64, t: f64| mms_target(case, x, t);
        let dt = |x: f64| {
            let (a, b) = (f(x, t + h), f(x, t - h));
            FieldPoint {
                v: (a.v - b.v) / (2.0 * h),
                u: (a.u - b.u) / (2.0 * h),
                w: [(a.w[0] - b.w[0]) / (2.0 * h), (a.w[1] - b.w[1]) / (2.0 * h)],
                b: [
                    (a.v * a.b[0] - b.v * b.b[0]) / (2.0 * h),
                    (a.v * a.b[1] - b.v * b.b[1]) / (2.0 * h),
                ],
                theta: (a.theta - b.theta) / (2.0 * h),
            }
        };
        let d = |g: &dyn Fn(f64) -> f64, x: f64| (g(x + h) - g(x - h)) / (2.0 * h);
        let ux = |x: f64| d(&|y| f(y, t).u, x);
        let thx = |x: f64| d(&|y| f(y, t).theta, x);
        let wx = |x: f64, k: usize| d(&|y| f(y, t).w[k], x);
        let bx = |x: f64, k: usize| d(&|y| f(y, t).b[k], x);
        let c = f(x, t);
        let ddt = dt(x);

        let total_p = |y: f64| {
            let s = f(y, t);
            p.r * s.theta / s.v + 0.5 * (s.b[0] * s.b[0] + s.b[1] * s.b[1])
        };
        let stress = |y: f64| {
            let s = f(y, t);
            viscosity_unchecked(s.v, p) * ux(y) / s.v
        };
        let u = ddt.u + d(&total_p, x) - d(&stress, x);
        let mut w = [0.0; 2];
        let mut m = [0.0; 2];
        for k in 0..2 {
            w[k] = ddt.w[k] - bx(x, k) - d(&|y| p.lambda * wx(y, k) / f(y, t).v, x);
            m[k] = ddt.b[k] - wx(x, k) - d(&|y| p.nu * bx(y, k) / f(y, t).v, x);
        }
        let heat_flux = |y: f64| conductivity_unchecked(f(y, t).theta, p) * thx(y) / f(y, t).v;
        let diss = (viscosity_unchecked(c.v, p) * ux(x).powi(2)
            + p.lambda * (wx(x, 0).powi(2) + wx(x, 1).powi(2))
            + p.nu * (bx(x, 0).powi(2) + bx(x, 1).powi(2)))
            / c.v;
        let theta = p.cv * ddt.theta + p.r * c.theta * ux(x) / c.v - d(&heat_flux, x) - diss;
        Sources {
            v: ddt.v - ux(x),
            u,
            w,
            m,
            theta,
        }
    }

    fn max_gap(a: &Sources, b: &Sources) -> f64 {
        [
            a.v - b.v,
            a.u - b.u,
            a.w[0] - b.w[0],
            a.w[1] - b.w[1],
            a.m[0] - b.m[0],
            a.m[1] - b.m[1],
            a.theta - b.theta,
        ]
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.abs()))
    }

    fn oracle_ratio(p: &Params) -> f64 {
        let pts = [(-2.1, 0.3), (-0.4, 1.1), (0.0, 0.7), (0.9, 2.5), (1.7, 0.05)];
        let err = |h: f64| {
            pts.iter()
                .map(|&(x, t)| {
                    max_gap(
                        &mms_sources(ManufacturedCase::Smooth, x, t, p),
                        &fd_residual(ManufacturedCase::Smooth, x, t, p, h),
                    )
                })
                .fold(0.0f64, f64::max)
        };
        let (e1, e2) = (err(4e-3), err(2e-3));
        assert!(e1 < 1e-3, "closed form disagrees with differences: {e1}");
        e1 / e2
    }

    #[test]
    fn far_field_sources_vanish() {
        let p = Params::default();
        for &x in &[-3.0, 0.0, 2.5] {
            let s = mms_sources(ManufacturedCase::FarField, x, 0.4, &p);
            assert_eq!(max_gap(&s, &Sources::default()), 0.0);
        }
    }

    #[test]
    fn volume_equation_holds_exactly() {
        let p = Params::default();
        for &(x, t) in &[(-1.0, 0.2), (0.3, 3.0), (2.0, 1.0)] {
            assert!(mms_sources(ManufacturedCase::Smooth, x, t, &p).v.abs() < 1e-15);
        }
    }

    #[test]
    fn sources_match_difference_oracle() {
        let r = oracle_ratio(&Params::default());
        assert!((r - 4.0).abs() < 0.2, "ratio {r}");
    }

    #[test]
    fn sources_match_oracle_with_variable_coefficients() {
        let p = Params {
            mu1: 0.7,
            mu2: 0.4,
            alpha: 0.6,
            beta: 1.5,
            kappa0: 0.8,
            lambda: 1.3,
            nu: 0.5,
            r: 0.9,
            cv: 2.0,
        };
        let r = oracle_ratio(&p);
        assert!((r - 4.0).abs() < 0.2, "ratio {r}");
    }

    #[test]
    fn targets_positive_and_decaying() {
        for k in 0..=160 {
            let x = -8.0 + 0.1 * k as f64;
            for &t in &[0.0, 0.5, 1.0, 2.0, 4.7] {
                let s = mms_target(ManufacturedCase::Smooth, x, t);
                assert!(s.v > 0.5 && s.theta > 0.5);
            }
        }
        let edge = mms_target(ManufacturedCase::Smooth, 8.0, 0.3);
        assert!((edge.v - 1.0).abs() < 1e-10 && edge.u.abs() < 1e-10);
    }

    #[test]
    fn case_names_round_trip() {
        for c in [ManufacturedCase::FarField, ManufacturedCase::Smooth] {
            assert_eq!(c.name().parse::<ManufacturedCase>().unwrap(), c);
        }
        assert!("foo".parse::<ManufacturedCase>().is_err());
    }
}
