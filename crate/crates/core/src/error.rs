use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock dimension {dim}: at least 2 levels are required")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "truncation inadequate: tail mass {tail_mass:.3e} in the top levels of dim={dim} exceeds {tolerance:.1e}"
    )]
    Truncation {
        tail_mass: f64,
        tolerance: f64,
        dim: usize,
    },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("code collapse: amplitude {alpha_t:.4} is below the orthogonality floor {floor:.4}")]
    CodeCollapse { alpha_t: f64, floor: f64 },

    #[error("quadrature did not converge: last change {change:.3e} after {levels} halvings")]
    QuadratureNonConvergence { change: f64, levels: usize },

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
