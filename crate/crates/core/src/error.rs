use thiserror::Error;

/// Errors produced by mesh construction, assembly, solvers and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh resolution must be at least 1 cell per unit length")]
    InvalidResolution,

    #[error("degenerate triangle: |det J| = {det:.3e} below tolerance")]
    DegenerateTriangle { det: f64 },

    #[error("quadrature degree {0} not supported (valid range 1..=6)")]
    QuadratureDegree(usize),

    #[error(
        "coefficient '{name}' is not uniformly positive: value {value:.3e} at ({x:.4}, {y:.4})"
    )]
    NonPositiveCoefficient {
        name: &'static str,
        value: f64,
        x: f64,
        y: f64,
    },

    #[error("meshes are not nested: coarse mesh is not an ancestor of the fine mesh")]
    NotNested,

    #[error("empty record: at least one time sample is required")]
    EmptyRecord,

    #[error("length mismatch: {left} errors vs {right} parameters")]
    LengthMismatch { left: usize, right: usize },

    #[error("parameters must be positive and strictly decreasing")]
    BadParameters,

    #[error("step matrix factorization failed: {0}")]
    SingularSystem(String),

    #[error("linear solve violated the residual contract: relative residual {residual:.3e}")]
    ResidualContract { residual: f64 },

    #[error("config key '{key}': {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::SingularSystem(_) | Error::ResidualContract { .. } => 3,
            _ => 1,
        }
    }
}
