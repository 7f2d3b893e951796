//! Run configuration: a strict TOML schema with documented defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use mhd1d_core::domain::{FieldPoint, GaussianBundle, Table};
use mhd1d_core::verify::{ManufacturedCase, MmsSetup};
use mhd1d_core::{
    make_grid, make_state, DomainKind, Error as CoreError, Grid, InitialProfile, Integrator,
    Params, ProblemType, SchemeConfig, State,
};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: RawGrid,
    #[serde(default)]
    problem: RawProblem,
    #[serde(default)]
    params: RawParams,
    scheme: RawScheme,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    probes: Vec<f64>,
    #[serde(default)]
    checks: RawChecks,
    #[serde(default)]
    output: RawOutput,
    mms: Option<RawMms>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    domain: Option<DomainKind>,
    length: f64,
    n_cells: i64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    #[serde(default)]
    regime: Regime,
}

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Regime {
    #[default]
    Cauchy,
    DirichletTheta,
    NeumannTheta,
}

impl From<Regime> for ProblemType {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Cauchy => ProblemType::Cauchy,
            Regime::DirichletTheta => ProblemType::DirichletTheta,
            Regime::NeumannTheta => ProblemType::NeumannTheta,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawParams {
    mu1: f64,
    mu2: f64,
    alpha: f64,
    beta: f64,
    kappa0: f64,
    lambda: f64,
    nu: f64,
    r: f64,
    cv: f64,
}

impl Default for RawParams {
    fn default() -> Self {
        let p = Params::default();
        RawParams {
            mu1: p.mu1,
            mu2: p.mu2,
            alpha: p.alpha,
            beta: p.beta,
            kappa0: p.kappa0,
            lambda: p.lambda,
            nu: p.nu,
            r: p.r,
            cv: p.cv,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    t_end: f64,
    dt_max: Option<f64>,
    cfl: Option<f64>,
    integrator: Option<Integrator>,
    record_stride: Option<i64>,
    positivity_floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum ProfileName {
    #[default]
    FarField,
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(default)]
    profile: ProfileName,
    center: Option<f64>,
    width: Option<f64>,
    v: Option<f64>,
    u: Option<f64>,
    u_odd: Option<f64>,
    theta: Option<f64>,
    b1: Option<f64>,
    b2: Option<f64>,
    w1: Option<f64>,
    w2: Option<f64>,
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawChecks {
    reconstruct: bool,
    reconstruct_tolerance: f64,
    entropy_slack: f64,
}

impl Default for RawChecks {
    fn default() -> Self {
        RawChecks {
            reconstruct: false,
            reconstruct_tolerance: 0.05,
            entropy_slack: 0.05,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    dir: PathBuf,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMms {
    case: String,
    dt_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChecksConfig {
    pub reconstruct: bool,
    /// Largest admitted `|v_rec - v|_inf / |v|_inf`.
    pub reconstruct_tolerance: f64,
    /// `G + int W <= (1 + entropy_slack) e0`.
    pub entropy_slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Grid,
    pub problem: ProblemType,
    pub params: Params,
    pub scheme: SchemeConfig,
    pub initial: InitialProfile,
    pub probes: Vec<f64>,
    pub checks: ChecksConfig,
    pub output_dir: PathBuf,
    pub mms: Option<MmsSetup>,
}

impl RunConfig {
    pub fn initial_state(&self) -> Result<State, CliError> {
        make_state(&self.grid, self.problem, &self.initial)
            .map_err(|e| CliError::Config(format!("initial: {e}")))
    }
}

fn key_error(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {reason}"))
}

fn positive(key: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(key_error(key, format!("must be a positive number, got {x}")))
    }
}

/// Reads and validates the config at `path`; relative paths inside the
/// file resolve against its directory.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, base)
}

pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| CliError::Config(format!("{e}").trim_end().to_string()))?;

    let problem: ProblemType = raw.problem.regime.into();
    let domain = raw.grid.domain.unwrap_or(problem.domain_kind());
    if domain != problem.domain_kind() {
        return Err(key_error(
            "grid.domain",
            format!("{domain:?} does not match problem.regime {problem:?}"),
        ));
    }
    let length = positive("grid.length", raw.grid.length)?;
    if raw.grid.n_cells < 4 {
        return Err(key_error(
            "grid.n_cells",
            format!("must be at least 4, got {}", raw.grid.n_cells),
        ));
    }
    let grid = make_grid(domain, length, raw.grid.n_cells as usize)
        .map_err(|e| key_error("grid", e))?;

    let rp = raw.params;
    let params = Params {
        mu1: rp.mu1,
        mu2: rp.mu2,
        alpha: rp.alpha,
        beta: rp.beta,
        kappa0: rp.kappa0,
        lambda: rp.lambda,
        nu: rp.nu,
        r: rp.r,
        cv: rp.cv,
    };
    params.validate().map_err(|e| match e {
        CoreError::InvalidParam { name, reason } => key_error(&format!("params.{name}"), reason),
        other => key_error("params", other),
    })?;

    let defaults = SchemeConfig::default();
    let rs = raw.scheme;
    let record_stride = match rs.record_stride {
        None => defaults.record_stride,
        Some(k) if k >= 1 => k as usize,
        Some(k) => return Err(key_error("scheme.record_stride", format!("must be >= 1, got {k}"))),
    };
    let scheme = SchemeConfig {
        dt_max: rs.dt_max.unwrap_or(defaults.dt_max),
        cfl: rs.cfl.unwrap_or(defaults.cfl),
        t_end: rs.t_end,
        integrator: rs.integrator.unwrap_or(defaults.integrator),
        positivity_floor: rs.positivity_floor.unwrap_or(defaults.positivity_floor),
        record_stride,
        magnetic: true,
    };
    scheme.validate().map_err(|e| match e {
        CoreError::InvalidParam { name, reason } => key_error(&format!("scheme.{name}"), reason),
        other => key_error("scheme", other),
    })?;

    let initial = initial_profile(&raw.initial, base)?;

    for (k, &x) in raw.probes.iter().enumerate() {
        if !(x >= grid.x_left() && x <= grid.x_right()) {
            return Err(key_error(
                &format!("probes[{k}]"),
                format!("{x} lies outside [{}, {}]", grid.x_left(), grid.x_right()),
            ));
        }
    }
    let checks = ChecksConfig {
        reconstruct: raw.checks.reconstruct,
        reconstruct_tolerance: positive(
            "checks.reconstruct_tolerance",
            raw.checks.reconstruct_tolerance,
        )?,
        entropy_slack: if raw.checks.entropy_slack >= 0.0 {
            raw.checks.entropy_slack
        } else {
            return Err(key_error("checks.entropy_slack", "must be >= 0"));
        },
    };
    if checks.reconstruct && raw.probes.is_empty() {
        return Err(key_error(
            "checks.reconstruct",
            "probes required: list at least one probe coordinate",
        ));
    }

    let mms = match raw.mms {
        None => None,
        Some(m) => {
            let case: ManufacturedCase = m
                .case
                .parse()
                .map_err(|e: CoreError| key_error("mms.case", e))?;
            if problem != ProblemType::Cauchy {
                return Err(key_error("mms", "manufactured cases run in the cauchy regime"));
            }
            let dt_factor = positive(
                "mms.dt_factor",
                m.dt_factor.unwrap_or(MmsSetup::default().dt_factor),
            )?;
            Some(MmsSetup {
                case,
                params,
                half_width: length,
                t_end: scheme.t_end,
                dt_factor,
                integrator: scheme.integrator,
            })
        }
    };

    let output_dir = if raw.output.dir.is_absolute() {
        raw.output.dir
    } else {
        base.join(raw.output.dir)
    };

    Ok(RunConfig {
        grid,
        problem,
        params,
        scheme,
        initial,
        probes: raw.probes,
        checks,
        output_dir,
        mms,
    })
}

fn initial_profile(raw: &RawInitial, base: &Path) -> Result<InitialProfile, CliError> {
    let gaussian_keys = [
        ("center", raw.center),
        ("width", raw.width),
        ("v", raw.v),
        ("u", raw.u),
        ("u_odd", raw.u_odd),
        ("theta", raw.theta),
        ("b1", raw.b1),
        ("b2", raw.b2),
        ("w1", raw.w1),
        ("w2", raw.w2),
    ];
    let stray = |allowed: &[&str]| -> Result<(), CliError> {
        for (name, val) in gaussian_keys {
            if val.is_some() && !allowed.contains(&name) {
                return Err(key_error(
                    &format!("initial.{name}"),
                    format!("not used by profile {:?}", raw.profile),
                ));
            }
        }
        Ok(())
    };
    match raw.profile {
        ProfileName::FarField => {
            stray(&[])?;
            if raw.path.is_some() {
                return Err(key_error("initial.path", "only used by the tabulated profile"));
            }
            Ok(InitialProfile::FarField)
        }
        ProfileName::Gaussian => {
            if raw.path.is_some() {
                return Err(key_error("initial.path", "only used by the tabulated profile"));
            }
            let bundle = GaussianBundle {
                center: raw.center.unwrap_or(0.0),
                width: positive("initial.width", raw.width.unwrap_or(1.0))?,
                v: raw.v.unwrap_or(0.0),
                u: raw.u.unwrap_or(0.0),
                u_odd: raw.u_odd.unwrap_or(0.0),
                theta: raw.theta.unwrap_or(0.0),
                b: [raw.b1.unwrap_or(0.0), raw.b2.unwrap_or(0.0)],
                w: [raw.w1.unwrap_or(0.0), raw.w2.unwrap_or(0.0)],
            };
            Ok(InitialProfile::Gaussian(bundle))
        }
        ProfileName::Tabulated => {
            stray(&[])?;
            let rel = raw
                .path
                .as_ref()
                .ok_or_else(|| key_error("initial.path", "required by the tabulated profile"))?;
            let path = if rel.is_absolute() {
                rel.clone()
            } else {
                base.join(rel)
            };
            read_table(&path).map(InitialProfile::Tabulated)
        }
    }
}

/// Columns `x,v,u,w1,w2,b1,b2,theta` with a header row.
pub const TABLE_COLUMNS: [&str; 8] = ["x", "v", "u", "w1", "w2", "b1", "b2", "theta"];

fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| key_error("initial.path", format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header: Vec<&str> = match lines.next() {
        Some((_, h)) => h.split(',').map(str::trim).collect(),
        None => return Err(key_error("initial.path", "table is empty")),
    };
    if header != TABLE_COLUMNS {
        return Err(key_error(
            "initial.path",
            format!("header must be {}", TABLE_COLUMNS.join(",")),
        ));
    }
    let mut xs = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| key_error("initial.path", format!("line {}: {e}", lineno + 1)))?;
        if vals.len() != TABLE_COLUMNS.len() {
            return Err(key_error(
                "initial.path",
                format!("line {}: expected {} columns", lineno + 1, TABLE_COLUMNS.len()),
            ));
        }
        xs.push(vals[0]);
        rows.push(FieldPoint {
            v: vals[1],
            u: vals[2],
            w: [vals[3], vals[4]],
            b: [vals[5], vals[6]],
            theta: vals[7],
        });
    }
    Table::new(xs, rows).map_err(|e| key_error("initial.path", e))
}
