//! Mesh, state, parameters and boundary regimes.
//!
//! The mesh is staggered in the Lagrangian mass coordinate: `v`, `theta` and
//! `b` live at cell centres, `u` and `w` live at nodes. Node `j` sits at
//! `x_left + j * dx`, cell `i` is bounded by nodes `i` and `i + 1`.
//!
//! Unbounded domains are truncated; the artificial ends are clamped to the
//! far-field state `(v, u, theta, b, w) = (1, 0, 1, 0, 0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Field, Result};

/// Far-field values of `v` and `theta`; `u`, `w`, `b` vanish there.
pub const FAR_V: f64 = 1.0;
pub const FAR_THETA: f64 = 1.0;

const COMPAT_TOL: f64 = 1e-10;
const COMPAT_SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    /// `[-L, L]`, truncation of the whole line.
    FullLine,
    /// `[0, L]`, truncation of the half-line with a wall at `x = 0`.
    HalfLine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub kind: DomainKind,
    pub half_width: f64,
    pub n_cells: usize,
    pub dx: f64,
    pub cell_centers: Vec<f64>,
    pub node_positions: Vec<f64>,
}

impl Grid {
    pub fn x_left(&self) -> f64 {
        self.node_positions[0]
    }

    pub fn x_right(&self) -> f64 {
        self.node_positions[self.n_cells]
    }

    pub fn length(&self) -> f64 {
        self.x_right() - self.x_left()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    /// Index of the node closest to `x`, clamped to the mesh.
    pub fn nearest_node(&self, x: f64) -> usize {
        let j = ((x - self.x_left()) / self.dx).round();
        j.clamp(0.0, self.n_cells as f64) as usize
    }

    /// Index of the cell containing `x`, clamped to the mesh.
    pub fn cell_containing(&self, x: f64) -> usize {
        let i = ((x - self.x_left()) / self.dx).floor();
        i.clamp(0.0, (self.n_cells - 1) as f64) as usize
    }

    /// Whether the left end is an artificial far-field boundary.
    pub fn left_is_far_field(&self) -> bool {
        self.kind == DomainKind::FullLine
    }
}

/// Builds a uniform mesh. `half_width` is `L`: the full line is truncated to
/// `[-L, L]` and the half-line to `[0, L]`.
pub fn make_grid(kind: DomainKind, half_width: f64, n_cells: usize) -> Result<Grid> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "truncation length must be positive, got {half_width}"
        )));
    }
    if n_cells < 4 {
        return Err(Error::InvalidGrid(format!(
            "need at least 4 cells, got {n_cells}"
        )));
    }
    let (left, extent) = match kind {
        DomainKind::FullLine => (-half_width, 2.0 * half_width),
        DomainKind::HalfLine => (0.0, half_width),
    };
    let dx = extent / n_cells as f64;
    let node_positions: Vec<f64> = (0..=n_cells).map(|j| left + j as f64 * dx).collect();
    let cell_centers: Vec<f64> = (0..n_cells)
        .map(|i| left + (i as f64 + 0.5) * dx)
        .collect();
    Ok(Grid {
        kind,
        half_width,
        n_cells,
        dx,
        cell_centers,
        node_positions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemType {
    /// Whole line, far-field limits on both sides.
    Cauchy,
    /// Half-line with `u = 0`, `theta = 1`, `b = w = 0` at the wall.
    DirichletTheta,
    /// Half-line with `u = 0`, `theta_x = 0`, `b = w = 0` at the wall.
    NeumannTheta,
}

impl ProblemType {
    pub fn domain_kind(self) -> DomainKind {
        match self {
            ProblemType::Cauchy => DomainKind::FullLine,
            ProblemType::DirichletTheta | ProblemType::NeumannTheta => DomainKind::HalfLine,
        }
    }

    pub fn check_grid(self, grid: &Grid) -> Result<()> {
        if grid.kind != self.domain_kind() {
            return Err(Error::InvalidArgument(format!(
                "problem {self:?} needs a {:?} grid, got {:?}",
                self.domain_kind(),
                grid.kind
            )));
        }
        Ok(())
    }
}

/// Material constants. `mu = mu1 + mu2 * v^-alpha`, `kappa = kappa0 * theta^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub mu1: f64,
    pub mu2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa0: f64,
    pub lambda: f64,
    pub nu: f64,
    pub r: f64,
    pub cv: f64,
}

impl Default for Params {
    /// Unit normalisation of every constant, with `mu2 = alpha = beta = 0`.
    fn default() -> Self {
        Params {
            mu1: 1.0,
            mu2: 0.0,
            alpha: 0.0,
            beta: 0.0,
            kappa0: 1.0,
            lambda: 1.0,
            nu: 1.0,
            r: 1.0,
            cv: 1.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, x: f64) -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParam {
                    name,
                    reason: format!("must be > 0, got {x}"),
                })
            }
        }
        fn non_negative(name: &'static str, x: f64) -> Result<()> {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParam {
                    name,
                    reason: format!("must be >= 0, got {x}"),
                })
            }
        }
        positive("mu1", self.mu1)?;
        non_negative("mu2", self.mu2)?;
        non_negative("alpha", self.alpha)?;
        non_negative("beta", self.beta)?;
        positive("kappa0", self.kappa0)?;
        positive("lambda", self.lambda)?;
        positive("nu", self.nu)?;
        positive("r", self.r)?;
        positive("cv", self.cv)?;
        Ok(())
    }

    /// Checked constructor.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu1: f64,
        mu2: f64,
        alpha: f64,
        beta: f64,
        kappa0: f64,
        lambda: f64,
        nu: f64,
        r: f64,
        cv: f64,
    ) -> Result<Self> {
        let p = Params {
            mu1,
            mu2,
            alpha,
            beta,
            kappa0,
            lambda,
            nu,
            r,
            cv,
        };
        p.validate()?;
        Ok(p)
    }
}

/// All five physical fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    /// Specific volume per cell.
    pub v: Vec<f64>,
    /// Temperature per cell.
    pub theta: Vec<f64>,
    /// Transverse magnetic field per cell, one vector per component.
    pub b: [Vec<f64>; 2],
    /// Longitudinal velocity per node.
    pub u: Vec<f64>,
    /// Transverse velocity per node, one vector per component.
    pub w: [Vec<f64>; 2],
}

impl State {
    pub fn n_cells(&self) -> usize {
        self.v.len()
    }

    /// The far-field equilibrium on `grid`.
    pub fn far_field(grid: &Grid) -> Self {
        let n = grid.n_cells;
        State {
            t: 0.0,
            v: vec![FAR_V; n],
            theta: vec![FAR_THETA; n],
            b: [vec![0.0; n], vec![0.0; n]],
            u: vec![0.0; n + 1],
            w: [vec![0.0; n + 1], vec![0.0; n + 1]],
        }
    }

    /// Checks positivity of `v`, `theta` and finiteness of every entry.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let cells = &grid.cell_centers;
        let nodes = &grid.node_positions;
        for (field, data) in [(Field::V, &self.v), (Field::Theta, &self.theta)] {
            for (&x, &val) in cells.iter().zip(data.iter()) {
                if !val.is_finite() {
                    return Err(Error::NonFinite { field, x });
                }
                if val <= 0.0 {
                    return Err(Error::NonPositive { field, x, value: val });
                }
            }
        }
        for comp in &self.b {
            if let Some(i) = comp.iter().position(|c| !c.is_finite()) {
                return Err(Error::NonFinite {
                    field: Field::B,
                    x: cells[i],
                });
            }
        }
        for (field, data) in [(Field::U, &self.u), (Field::W, &self.w[0]), (Field::W, &self.w[1])] {
            if let Some(j) = data.iter().position(|c| !c.is_finite()) {
                return Err(Error::NonFinite { field, x: nodes[j] });
            }
        }
        Ok(())
    }

    /// Largest deviation of any field from the far-field state.
    pub fn max_far_field_deviation(&self) -> f64 {
        let cell = self
            .v
            .iter()
            .map(|v| (v - FAR_V).abs())
            .chain(self.theta.iter().map(|t| (t - FAR_THETA).abs()))
            .chain(self.b.iter().flatten().map(|b| b.abs()));
        let node = self
            .u
            .iter()
            .chain(self.w.iter().flatten())
            .map(|x| x.abs());
        cell.chain(node).fold(0.0, f64::max)
    }
}

/// Values of every field at a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub b: [f64; 2],
    pub w: [f64; 2],
}

impl FieldPoint {
    pub const FAR_FIELD: FieldPoint = FieldPoint {
        v: FAR_V,
        u: 0.0,
        theta: FAR_THETA,
        b: [0.0; 2],
        w: [0.0; 2],
    };
}

/// Initial-data recipe evaluated pointwise.
pub trait Profile {
    fn eval(&self, x: f64) -> FieldPoint;
}

impl<F: Fn(f64) -> FieldPoint> Profile for F {
    fn eval(&self, x: f64) -> FieldPoint {
        self(x)
    }
}

/// Gaussian bumps of common centre and width added to the far-field state.
///
/// `u_odd` adds an odd component `u_odd * s * exp(-s^2)` with
/// `s = (x - center) / width`, which drives compression or rarefaction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GaussianBundle {
    pub center: f64,
    pub width: f64,
    pub v: f64,
    pub u: f64,
    pub u_odd: f64,
    pub theta: f64,
    pub b: [f64; 2],
    pub w: [f64; 2],
}

impl Profile for GaussianBundle {
    fn eval(&self, x: f64) -> FieldPoint {
        let s = (x - self.center) / self.width;
        let g = (-s * s).exp();
        FieldPoint {
            v: FAR_V + self.v * g,
            u: self.u * g + self.u_odd * s * g,
            theta: FAR_THETA + self.theta * g,
            b: [self.b[0] * g, self.b[1] * g],
            w: [self.w[0] * g, self.w[1] * g],
        }
    }
}

/// Tabulated columns, linearly interpolated; far-field outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub x: Vec<f64>,
    pub rows: Vec<FieldPoint>,
}

impl Table {
    pub fn new(x: Vec<f64>, rows: Vec<FieldPoint>) -> Result<Self> {
        if x.len() != rows.len() || x.len() < 2 {
            return Err(Error::InvalidArgument(
                "table needs at least two rows with matching lengths".into(),
            ));
        }
        if x.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidArgument(
                "table coordinates must be strictly increasing".into(),
            ));
        }
        Ok(Table { x, rows })
    }
}

impl Profile for Table {
    fn eval(&self, x: f64) -> FieldPoint {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return FieldPoint::FAR_FIELD;
        }
        let k = self.x.partition_point(|&xi| xi <= x).clamp(1, n - 1);
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let s = (x - x0) / (x1 - x0);
        let (a, b) = (&self.rows[k - 1], &self.rows[k]);
        let lerp = |p: f64, q: f64| p + s * (q - p);
        FieldPoint {
            v: lerp(a.v, b.v),
            u: lerp(a.u, b.u),
            theta: lerp(a.theta, b.theta),
            b: [lerp(a.b[0], b.b[0]), lerp(a.b[1], b.b[1])],
            w: [lerp(a.w[0], b.w[0]), lerp(a.w[1], b.w[1])],
        }
    }
}

/// Named initial-data recipes.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    FarField,
    Gaussian(GaussianBundle),
    Tabulated(Table),
}

impl Profile for InitialProfile {
    fn eval(&self, x: f64) -> FieldPoint {
        match self {
            InitialProfile::FarField => FieldPoint::FAR_FIELD,
            InitialProfile::Gaussian(g) => g.eval(x),
            InitialProfile::Tabulated(t) => t.eval(x),
        }
    }
}

fn check_wall_compatibility(profile: &dyn Profile, problem: ProblemType) -> Result<()> {
    let at0 = profile.eval(0.0);
    let mut bad = Vec::new();
    if at0.u.abs() > COMPAT_TOL {
        bad.push(format!("u(0) = {}", at0.u));
    }
    for k in 0..2 {
        if at0.b[k].abs() > COMPAT_TOL {
            bad.push(format!("b{}(0) = {}", k + 1, at0.b[k]));
        }
        if at0.w[k].abs() > COMPAT_TOL {
            bad.push(format!("w{}(0) = {}", k + 1, at0.w[k]));
        }
    }
    match problem {
        ProblemType::DirichletTheta => {
            if (at0.theta - FAR_THETA).abs() > COMPAT_TOL {
                bad.push(format!("theta(0) = {} (must be 1)", at0.theta));
            }
        }
        ProblemType::NeumannTheta => {
            // one-sided second-order slope
            let h = 1e-4;
            let slope = (-3.0 * at0.theta + 4.0 * profile.eval(h).theta
                - profile.eval(2.0 * h).theta)
                / (2.0 * h);
            if slope.abs() > COMPAT_SLOPE_TOL {
                bad.push(format!("theta_x(0) = {slope} (must be 0)"));
            }
        }
        ProblemType::Cauchy => {}
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Incompatible(bad.join(", ")))
    }
}

/// Samples `profile` onto the mesh at `t = 0`.
///
/// Boundary nodes take the boundary value of `u` and `w` (zero for every
/// regime). Half-line regimes require the profile to satisfy the wall
/// conditions at `x = 0`.
pub fn make_state(grid: &Grid, problem: ProblemType, profile: &dyn Profile) -> Result<State> {
    problem.check_grid(grid)?;
    if problem != ProblemType::Cauchy {
        check_wall_compatibility(profile, problem)?;
    }
    let n = grid.n_cells;
    let mut state = State::far_field(grid);
    for (i, &x) in grid.cell_centers.iter().enumerate() {
        let p = profile.eval(x);
        state.v[i] = p.v;
        state.theta[i] = p.theta;
        state.b[0][i] = p.b[0];
        state.b[1][i] = p.b[1];
    }
    for (j, &x) in grid.node_positions.iter().enumerate() {
        if j == 0 || j == n {
            continue;
        }
        let p = profile.eval(x);
        state.u[j] = p.u;
        state.w[0][j] = p.w[0];
        state.w[1][j] = p.w[1];
    }
    state.validate(grid)?;
    Ok(state)
}

/// A state with one ghost cell on each side of every cell field.
///
/// Cell arrays have length `n + 2` with the ghost at index `0` and `n + 1`;
/// node arrays have length `n + 1` with boundary values enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct Ghosted {
    pub t: f64,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    pub b: [Vec<f64>; 2],
    pub u: Vec<f64>,
    pub w: [Vec<f64>; 2],
}

impl Ghosted {
    /// Strips the ghosts.
    pub fn interior(&self) -> State {
        let n = self.v.len() - 2;
        State {
            t: self.t,
            v: self.v[1..=n].to_vec(),
            theta: self.theta[1..=n].to_vec(),
            b: [self.b[0][1..=n].to_vec(), self.b[1][1..=n].to_vec()],
            u: self.u.clone(),
            w: self.w.clone(),
        }
    }
}

/// How a ghost cell value is formed from the adjacent interior value:
/// `ghost = scale * edge + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostRule {
    pub scale: f64,
    pub offset: f64,
}

impl GhostRule {
    pub const fn clamp(value: f64) -> Self {
        GhostRule {
            scale: 0.0,
            offset: value,
        }
    }
    pub const fn even() -> Self {
        GhostRule {
            scale: 1.0,
            offset: 0.0,
        }
    }
    /// Odd mirror about `value`: the face value equals `value`.
    pub const fn odd_about(value: f64) -> Self {
        GhostRule {
            scale: -1.0,
            offset: 2.0 * value,
        }
    }
    pub fn apply(self, edge: f64) -> f64 {
        self.scale * edge + self.offset
    }
}

/// Ghost rules for the cell fields at both ends of the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRules {
    pub v: [GhostRule; 2],
    pub theta: [GhostRule; 2],
    pub b: [GhostRule; 2],
}

pub fn cell_rules(problem: ProblemType) -> CellRules {
    let far_v = GhostRule::clamp(FAR_V);
    let far_t = GhostRule::clamp(FAR_THETA);
    let far_b = GhostRule::clamp(0.0);
    match problem {
        ProblemType::Cauchy => CellRules {
            v: [far_v, far_v],
            theta: [far_t, far_t],
            b: [far_b, far_b],
        },
        ProblemType::DirichletTheta => CellRules {
            v: [GhostRule::even(), far_v],
            theta: [GhostRule::odd_about(FAR_THETA), far_t],
            b: [GhostRule::odd_about(0.0), far_b],
        },
        ProblemType::NeumannTheta => CellRules {
            v: [GhostRule::even(), far_v],
            theta: [GhostRule::even(), far_t],
            b: [GhostRule::odd_about(0.0), far_b],
        },
    }
}

pub(crate) fn pad(interior: &[f64], rules: [GhostRule; 2]) -> Vec<f64> {
    let n = interior.len();
    let mut out = Vec::with_capacity(n + 2);
    out.push(rules[0].apply(interior[0]));
    out.extend_from_slice(interior);
    out.push(rules[1].apply(interior[n - 1]));
    out
}

/// Fills ghost cells and boundary nodes for `problem`.
///
/// Far-field ends clamp to `(1, 0, 1, 0, 0)`. At the wall `u = w = 0`, `b` is
/// mirrored oddly, `v` evenly, and `theta` oddly about 1 (Dirichlet) or
/// evenly (Neumann).
pub fn apply_boundary(state: &State, problem: ProblemType) -> Ghosted {
    let rules = cell_rules(problem);
    let mut u = state.u.clone();
    let mut w = state.w.clone();
    let last = u.len() - 1;
    for arr in std::iter::once(&mut u).chain(w.iter_mut()) {
        arr[0] = 0.0;
        arr[last] = 0.0;
    }
    Ghosted {
        t: state.t,
        v: pad(&state.v, rules.v),
        theta: pad(&state.theta, rules.theta),
        b: [pad(&state.b[0], rules.b), pad(&state.b[1], rules.b)],
        u,
        w,
    }
}
