use std::path::PathBuf;

use thiserror::Error;

/// One offending configuration key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub key: String,
    pub expected: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.expected)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("chaining failed at point {index}: gap {gap:.3e} exceeds 10x median gap {median:.3e}")]
    Chaining { index: usize, gap: f64, median: f64 },

    #[error("degenerate stencil at point {index}: {reason}")]
    DegenerateStencil { index: usize, reason: String },

    #[error("chart at point {index} did not converge: alpha_1 = {alpha1:.3e} after {iterations} fits")]
    ChartNotConverged {
        index: usize,
        alpha1: f64,
        iterations: usize,
    },

    #[error("tangled or misordered points at {index}: ds+ = {ds_plus:.3e}, ds- = {ds_minus:.3e}")]
    Tangled {
        index: usize,
        ds_plus: f64,
        ds_minus: f64,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix: zero pivot at column {pivot}")]
    Singular { pivot: usize },

    #[error("self-intersection detected at t = {time:.6e}: {reason}")]
    SelfIntersection { time: f64, reason: String },

    #[error("spline: {0}")]
    Spline(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {}", join_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Pipeline stage the error originates from, as reported by the CLI.
    pub fn stage(&self) -> &'static str {
        match self {
            Error::InvalidCurve(_) | Error::Chaining { .. } => "input",
            Error::DegenerateStencil { .. } | Error::ChartNotConverged { .. } | Error::Tangled { .. } => {
                "geometry"
            }
            Error::NonFinite { .. } => "assembly",
            Error::Dimension(_) | Error::Singular { .. } => "solver",
            Error::SelfIntersection { .. } | Error::Spline(_) => "evolution",
            Error::InsufficientData(_) => "experiments",
            Error::InvalidInput(_) => "input",
            Error::Config(_) => "config",
            Error::Io { .. } | Error::Parse { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
