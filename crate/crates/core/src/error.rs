use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("decay rate singular at lambda_t = {lambda_t}: |G| = {abs_g:e} is below the floor; use the state derivative instead")]
    SingularRates { lambda_t: f64, abs_g: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("grid resolution insufficient: {0}")]
    GridResolution(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable label, used in the flag column of sweep tables.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NumericalDegeneracy(_) => "numerical_degeneracy",
            Error::SingularRates { .. } => "singular_rates",
            Error::Unsupported(_) => "unsupported",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::DegeneratePath(_) => "degenerate_path",
            Error::GridResolution(_) => "grid_resolution",
            Error::Io(_) => "io",
        }
    }

    /// Whether the error stems from the request rather than the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Unsupported(_) | Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
