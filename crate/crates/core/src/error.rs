use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid permittivity profile: {0}")]
    InvalidProfile(String),

    /// Slab interface at `position` does not coincide with a mesh node.
    #[error("slab interface at x = {position:.6e} m is not on a mesh node (nearest node {nearest:.6e} m)")]
    MeshAlignment { position: f64, nearest: f64 },

    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("state norm {norm:.12} deviates from 1")]
    Unnormalized { norm: f64 },

    #[error("packet projection is degenerate (norm {norm:.3e} before rescaling)")]
    DegenerateProjection { norm: f64 },

    #[error("operation requires a state of arity {expected}, got {got}")]
    Arity { expected: &'static str, got: usize },

    #[error("detector intensity {intensity:.3e} is below the resolvable floor")]
    DegenerateDenominator { intensity: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("photon number {photons} exceeds truncation {limit}")]
    TruncationExceeded { photons: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for usage/configuration problems, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidMesh(_)
            | Error::InvalidProfile(_)
            | Error::MeshAlignment { .. } => 2,
            _ => 1,
        }
    }
}
