use thiserror::Error;

/// Failure modes of grid construction, field evaluation, bound checks,
/// evolution and corpus runs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid extent: x_max ({x_max}) must exceed x_min ({x_min})")]
    InvalidExtent { x_min: f64, x_max: f64 },

    #[error("grid too coarse: {0} points (need at least 16)")]
    TooCoarse(usize),

    #[error("grid too small for state: {0}")]
    GridTooSmall(String),

    #[error("length mismatch: field has {got} values, grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("boundary leakage: |psi| at edge is {ratio:e} of max (limit {limit:e})")]
    BoundaryLeakage { ratio: f64, limit: f64 },

    #[error("wavefunction not normalized: norm {norm} (tolerance {tol:e})")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("every grid point is below the node threshold")]
    AllMasked,

    #[error("state is node-dominated: masked fraction {0}")]
    NodeDominated(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("box wall at x = {0} does not fall on a grid node")]
    BoxWallOffGrid(f64),

    #[error("state has hard walls and no free-space momentum transform")]
    NonSpectral,

    #[error("unstable time step: dt*max|V|/hbar = {0} exceeds 0.5")]
    UnstableStep(f64),

    #[error("too few trajectories: {got} usable, need {needed}")]
    TooFewTrajectories { got: usize, needed: usize },

    #[error("density is not symmetric about its mean (max mismatch {0:e})")]
    AsymmetricDensity(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Numerical failures (as opposed to configuration or precondition
    /// problems) map to the dedicated CLI exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BoundaryLeakage { .. }
                | Error::NotNormalized { .. }
                | Error::AllMasked
                | Error::NodeDominated(_)
                | Error::UnstableStep(_)
                | Error::GridTooSmall(_)
                | Error::TooFewTrajectories { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
