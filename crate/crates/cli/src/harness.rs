//! Estimate checks evaluated at every recorded state of a run.

use std::fmt;

use serde::Serialize;

use mhd1d_core::functionals::{
    e0, lyapunov_report, measure_bound_check, reconstruct_profile, sobolev_check,
    window_average_check, LyapunovReport,
};
use mhd1d_core::{Error as CoreError, Grid, Params, ProblemType, State, Trajectory};

use crate::config::ChecksConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Not applicable to this run.
    Skip,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn failed(self) -> bool {
        self == Verdict::Fail
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip => "skip",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const CHECK_NAMES: [&str; 5] = ["entropy", "window", "measure", "sobolev", "reconstruct"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub entropy: Verdict,
    pub window: Verdict,
    pub measure: Verdict,
    pub sobolev: Verdict,
    pub reconstruct: Verdict,
}

impl Verdicts {
    pub fn all(&self) -> [Verdict; 5] {
        [
            self.entropy,
            self.window,
            self.measure,
            self.sobolev,
            self.reconstruct,
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.all().iter().any(|v| v.failed())
    }

    /// Element-wise: a failure anywhere wins, then a pass, then a skip.
    fn merge(self, other: Verdicts) -> Verdicts {
        let m = |a: Verdict, b: Verdict| match (a, b) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
            _ => Verdict::Skip,
        };
        Verdicts {
            entropy: m(self.entropy, other.entropy),
            window: m(self.window, other.window),
            measure: m(self.measure, other.measure),
            sobolev: m(self.sobolev, other.sobolev),
            reconstruct: m(self.reconstruct, other.reconstruct),
        }
    }
}

/// One row of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub report: LyapunovReport,
    /// `G(t) + int_0^t W`.
    pub entropy_budget: f64,
    /// Largest `|v_rec - v|_inf / |v|_inf` over the probes, `NaN` when not
    /// checked.
    pub reconstruct_error: f64,
    pub verdicts: Verdicts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessSummary {
    pub e0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub measure_bound: f64,
    pub verdicts: Verdicts,
}

/// Perturbation fields `v - 1`, `theta - 1`, `b` on cells and `u`, `w` on
/// nodes, with the ends that face the far field.
fn perturbations(state: &State, grid: &Grid) -> Vec<(Vec<f64>, [bool; 2])> {
    let far = [grid.left_is_far_field(), true];
    // node arrays already carry the zero boundary values
    let nodes = [false, false];
    vec![
        (state.v.iter().map(|v| v - 1.0).collect(), far),
        (state.theta.iter().map(|t| t - 1.0).collect(), far),
        (state.b[0].clone(), far),
        (state.b[1].clone(), far),
        (state.u.clone(), nodes),
        (state.w[0].clone(), nodes),
        (state.w[1].clone(), nodes),
    ]
}

fn sup_relative_error(rec: &[f64], v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    rec.iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / scale
}

/// Evaluates every check at every record of `traj`.
pub fn evaluate(
    traj: &Trajectory,
    grid: &Grid,
    problem: ProblemType,
    params: &Params,
    checks: &ChecksConfig,
) -> Result<(Vec<SeriesRow>, HarnessSummary), CoreError> {
    let e = e0(traj.initial(), grid)?;
    let (alpha1, alpha2) = mhd1d_core::functionals::entropy_roots(e);
    let mut rows = Vec::with_capacity(traj.records.len());
    let mut integral_w = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut overall: Option<Verdicts> = None;

    for (k, state) in traj.records.iter().enumerate() {
        let report = lyapunov_report(state, grid, problem, params)?;
        if let Some((t, w)) = prev {
            integral_w += 0.5 * (report.t - t) * (w + report.w_dissipation);
        }
        prev = Some((report.t, report.w_dissipation));
        let budget = report.g_entropy + integral_w;

        let window = match window_average_check(state, grid, e) {
            Ok(ws) => Verdict::from_bool(ws.iter().all(|w| w.v_in_range && w.theta_in_range)),
            Err(CoreError::WindowTooShort) => Verdict::Skip,
            Err(other) => return Err(other),
        };
        let sobolev = Verdict::from_bool(
            perturbations(state, grid)
                .iter()
                .all(|(f, ends)| sobolev_check(f, grid.dx, *ends).pass),
        );
        let (reconstruct, reconstruct_error) = if checks.reconstruct {
            let err = traj
                .probes
                .iter()
                .map(|h| sup_relative_error(&reconstruct_profile(h, k), &state.v))
                .fold(0.0f64, f64::max);
            (
                Verdict::from_bool(err <= checks.reconstruct_tolerance),
                err,
            )
        } else {
            (Verdict::Skip, f64::NAN)
        };
        let verdicts = Verdicts {
            entropy: Verdict::from_bool(budget <= (1.0 + checks.entropy_slack) * e),
            window,
            measure: Verdict::from_bool(measure_bound_check(&report, e).pass),
            sobolev,
            reconstruct,
        };
        overall = Some(match overall {
            None => verdicts,
            Some(o) => o.merge(verdicts),
        });
        rows.push(SeriesRow {
            report,
            entropy_budget: budget,
            reconstruct_error,
            verdicts,
        });
    }
    let summary = HarnessSummary {
        e0: e,
        alpha1,
        alpha2,
        measure_bound: mhd1d_core::functionals::measure_bound(e),
        verdicts: overall.expect("trajectory has at least one record"),
    };
    Ok((rows, summary))
}
