//! Implicit diffusion kernel shared by every field update.
//!
//! Solves `(M - dt D_x(c D_x)) f = rhs` on a uniform mesh where `M` is a
//! positive diagonal (identity by default), `c[k]` is the coefficient on the
//! interface left of unknown `k` (so `c` has one more entry than `f`), and
//! the values beyond either end follow a [`GhostRule`].

use crate::domain::GhostRule;
use crate::error::{Error, Result};

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n - 1]` are ignored.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c_prime = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(breakdown(0, pivot));
    }
    c_prime[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c_prime[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(breakdown(i, pivot));
        }
        c_prime[i] = upper[i] / pivot;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    Ok(x)
}

fn breakdown(row: usize, pivot: f64) -> Error {
    Error::SolverBreakdown {
        t: f64::NAN,
        reason: format!("pivot {pivot} in row {row} of tridiagonal solve"),
    }
}

/// `(I - dt D_x(c D_x)) f = rhs`.
pub fn diffusion_solve(
    coeff: &[f64],
    rhs: &[f64],
    dt: f64,
    dx: f64,
    ends: [GhostRule; 2],
) -> Result<Vec<f64>> {
    let mass = vec![1.0; rhs.len()];
    diffusion_solve_weighted(&mass, coeff, rhs, dt, dx, ends)
}

/// `(diag(mass) - dt D_x(c D_x)) f = rhs`.
pub fn diffusion_solve_weighted(
    mass: &[f64],
    coeff: &[f64],
    rhs: &[f64],
    dt: f64,
    dx: f64,
    ends: [GhostRule; 2],
) -> Result<Vec<f64>> {
    let m = rhs.len();
    if coeff.len() != m + 1 || mass.len() != m {
        return Err(Error::InvalidArgument(format!(
            "diffusion system: {m} unknowns need {} coefficients and {m} mass entries, got {} and {}",
            m + 1,
            coeff.len(),
            mass.len()
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    assert!(
        coeff.iter().all(|&c| c >= 0.0) && dt >= 0.0,
        "diffusion coefficients and dt must be non-negative"
    );
    let r = dt / (dx * dx);
    let mut lower = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut b = rhs.to_vec();
    for k in 0..m {
        let (cl, cr) = (r * coeff[k], r * coeff[k + 1]);
        diag[k] = mass[k] + cl + cr;
        if k > 0 {
            lower[k] = -cl;
        }
        if k + 1 < m {
            upper[k] = -cr;
        }
    }
    // ghost = scale * edge + offset
    let [left, right] = ends;
    let cl = r * coeff[0];
    diag[0] -= cl * left.scale;
    b[0] += cl * left.offset;
    let cr = r * coeff[m];
    diag[m - 1] -= cr * right.scale;
    b[m - 1] += cr * right.offset;
    thomas(&lower, &diag, &upper, &b)
}

/// Same system as [`diffusion_solve_weighted`], solved for the correction
/// to `guess`. States that already satisfy the system (equilibria) come
/// back bit-for-bit unchanged.
pub fn diffusion_solve_from(
    guess: &[f64],
    mass: &[f64],
    coeff: &[f64],
    rhs: &[f64],
    dt: f64,
    dx: f64,
    ends: [GhostRule; 2],
) -> Result<Vec<f64>> {
    let m = rhs.len();
    if guess.len() != m {
        return Err(Error::InvalidArgument(format!(
            "guess has {} entries for {m} unknowns",
            guess.len()
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    if coeff.len() != m + 1 {
        return Err(Error::InvalidArgument(format!(
            "diffusion system: {m} unknowns need {} coefficients, got {}",
            m + 1,
            coeff.len()
        )));
    }
    let r = dt / (dx * dx);
    let at = |k: isize| -> f64 {
        if k < 0 {
            ends[0].apply(guess[0])
        } else if k as usize >= m {
            ends[1].apply(guess[m - 1])
        } else {
            guess[k as usize]
        }
    };
    let residual: Vec<f64> = (0..m)
        .map(|k| {
            let ki = k as isize;
            let flux_r = coeff[k + 1] * (at(ki + 1) - guess[k]);
            let flux_l = coeff[k] * (guess[k] - at(ki - 1));
            rhs[k] - (mass[k] * guess[k] - r * (flux_r - flux_l))
        })
        .collect();
    let homogeneous = ends.map(|e| GhostRule {
        scale: e.scale,
        offset: 0.0,
    });
    let delta = diffusion_solve_weighted(mass, coeff, &residual, dt, dx, homogeneous)?;
    Ok(guess.iter().zip(delta).map(|(g, d)| g + d).collect())
}
