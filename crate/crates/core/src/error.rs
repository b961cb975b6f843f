use std::path::PathBuf;

/// Errors raised by mesh construction, solvers and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("face {face} references invalid or repeated vertex indices {indices:?}")]
    InvalidFace { face: usize, indices: [usize; 3] },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("inconsistent face orientation across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),
    #[error("face {face} is degenerate (zero area or violated triangle inequality)")]
    DegenerateFace { face: usize },
    #[error("missing or non-positive length for edge ({0}, {1})")]
    MissingEdgeLength(usize, usize),
    #[error("intrinsic and embedded edge lengths disagree on edge ({0}, {1}): {2} vs {3}")]
    LengthMismatch(usize, usize, f64, f64),
    #[error("vertex {0} is isolated (no incident face)")]
    IsolatedVertex(usize),
    #[error("field has length {got}, expected {expected}")]
    LengthMismatchField { expected: usize, got: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("unknown surface id `{0}`")]
    UnknownSurface(String),
    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),
    #[error("parse error in {path:?} line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
