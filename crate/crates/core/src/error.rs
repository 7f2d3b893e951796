use thiserror::Error;

/// Field identifiers used in error messages and warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    V,
    U,
    W,
    B,
    Theta,
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Field::V => "v",
            Field::U => "u",
            Field::W => "w",
            Field::B => "b",
            Field::Theta => "theta",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("{field} must be positive, found {value} at x = {x}")]
    NonPositive { field: Field, x: f64, value: f64 },

    #[error("non-finite {field} at x = {x}")]
    NonFinite { field: Field, x: f64 },

    #[error("initial data incompatible with boundary regime at x = 0: {0}")]
    Incompatible(String),

    #[error("positivity breach: {field} = {value} below floor {floor} at x = {x}, t = {t}")]
    PositivityBreach {
        field: Field,
        x: f64,
        t: f64,
        value: f64,
        floor: f64,
    },

    #[error("solver breakdown at t = {t}: {reason}")]
    SolverBreakdown { t: f64, reason: String },

    #[error("no probe history recorded at N = {0}")]
    MissingProbe(f64),

    #[error("domain shorter than one unit window")]
    WindowTooShort,

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
