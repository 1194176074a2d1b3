use std::path::PathBuf;

use thiserror::Error;

use crate::biphoton::Domain;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A source, setup or physical parameter violates one of its invariants.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The grid does not resolve a feature of the state (linewidth, pulse width, coverage).
    #[error("grid resolution error: {0}")]
    GridResolution(String),

    /// Too much probability sits at the edge of the grid for the state to be representable.
    #[error("out-of-band amplitude {mass:.3e} exceeds the {limit:.0e} budget")]
    OutOfBand { mass: f64, limit: f64 },

    #[error("time bins overlap: separation {separation} must exceed 5 x pulse width {width}")]
    BinOverlap { separation: f64, width: f64 },

    #[error("expected a {expected:?}-domain state, found {found:?}")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("fringe scan does not cover a full period of the phase sum ({0})")]
    InsufficientCoverage(String),

    #[error("delay {delay} falls outside the time grid (|t| <= {limit})")]
    OffGrid { delay: f64, limit: f64 },

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("separation r = {separation} is not outside the interaction cone c*dt = {duration}")]
    OnCone { separation: f64, duration: f64 },

    #[error("probabilities exceed unity: |b|^2 + p_gamma = {0}")]
    OverUnity(f64),

    #[error("post-selection has zero support (|a|^2 + |b|^2 = 0)")]
    ZeroSupport,

    #[error("nothing to balance: {0}")]
    ZeroBranch(String),

    #[error("numerical invariant violated: {0}")]
    NumericalValidity(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::UnknownExperiment(_) | Error::Parameter(_) => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}

/// Non-fatal diagnostic raised when a simulation runs outside the regime its
/// physics assumes. Washed-out fringes are a legitimate result, so these never abort.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegimeWarning {
    pub code: String,
    pub message: String,
}

impl RegimeWarning {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        RegimeWarning {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// A value together with the regime warnings raised while computing it.
#[derive(Debug, Clone)]
pub struct Warned<T> {
    pub value: T,
    pub warnings: Vec<RegimeWarning>,
}

impl<T> Warned<T> {
    pub fn clean(value: T) -> Self {
        Warned {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Warned<U> {
        Warned {
            value: f(self.value),
            warnings: self.warnings,
        }
    }
}
