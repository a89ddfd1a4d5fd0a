use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidSpec(String),

    #[error("vertex {0:?} lies outside the box")]
    OutOfBox(Vec<i64>),

    #[error("edge {base:?} along axis {axis} is not an edge of the box")]
    InvalidEdge { base: Vec<i64>, axis: usize },

    #[error("edge index {0} out of range")]
    EdgeIndex(usize),

    #[error("edge {0} listed twice")]
    DuplicateEdge(usize),

    #[error("{what}: size {got} exceeds the cap of {cap}")]
    SizeCap { what: &'static str, got: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("environment does not match the lattice ({got} edges, expected {expected})")]
    EnvironmentMismatch { got: usize, expected: usize },

    #[error("environment file: {0}")]
    EnvFile(String),

    #[error("lane embedding infeasible: {0}")]
    GeometryInfeasible(String),

    #[error(
        "lane embedding failed verification at assignment {mask:#b}: lattice gives {lattice}, lane model gives {model}"
    )]
    VerificationMismatch { mask: u64, lattice: i64, model: i64 },

    #[error("reports are not comparable: {0}")]
    MismatchedReports(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn cap(what: &'static str, got: usize, cap: usize) -> Self {
        Error::SizeCap { what, got, cap }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
