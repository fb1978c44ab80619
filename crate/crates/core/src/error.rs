use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("profile is not concave: slope increases by {excess:e} at knot {index}")]
    NonConcave { index: usize, excess: f64 },
    #[error("profile is identically zero")]
    AllZero,
    #[error("knots must be strictly increasing in x and span [0, 1]")]
    UnsortedKnots,
    #[error("invalid profile data: {0}")]
    InvalidProfile(String),
    #[error("profile is not normalized: total mass {0}")]
    NotNormalized(f64),
    #[error("profile is an extreme point and admits no decomposition")]
    IsExtreme,
    #[error("mesh too coarse: {0} elements")]
    MeshTooCoarse(usize),
    #[error("weight vanishes at interior node {0}")]
    SingularWeight(usize),
    #[error("eigen solver did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("sampled function is not quasi-concave at node {0}")]
    NotQuasiConcave(usize),
    #[error("sampled function must vanish at both endpoints")]
    BoundaryNotZero,
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("interior stiffness block is singular")]
    SingularInterior,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("assertion failed: {0}")]
    AssertionFailure(String),
}

impl Error {
    /// Stable variant name used in machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConcave { .. } => "NonConcave",
            Error::AllZero => "AllZero",
            Error::UnsortedKnots => "UnsortedKnots",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::NotNormalized(_) => "NotNormalized",
            Error::IsExtreme => "IsExtreme",
            Error::MeshTooCoarse(_) => "MeshTooCoarse",
            Error::SingularWeight(_) => "SingularWeight",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::NotQuasiConcave(_) => "NotQuasiConcave",
            Error::BoundaryNotZero => "BoundaryNotZero",
            Error::DegenerateDomain(_) => "DegenerateDomain",
            Error::SingularInterior => "SingularInterior",
            Error::InvalidInput(_) => "InvalidInput",
            Error::AssertionFailure(_) => "AssertionFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
