use std::path::PathBuf;

/// Errors produced by the contact-analogy engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mask has no foreground")]
    EmptyMask,
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("target mask has no foreground cells")]
    NoForeground,
    #[error("format error: {0}")]
    Format(String),
    #[error("dimension error: expected {expected} values, found {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("degenerate parabola fit (sum of x'^4 below threshold)")]
    DegenerateFit,
    #[error("insufficient support: {found} edge points within scale (need at least 5)")]
    InsufficientSupport { found: usize },
    #[error("no ray hit any edge point")]
    EmptySelection,
    #[error("no point with the required convexity in the observation region")]
    NoMatchingConvexity,
    #[error("no candidates: {0}")]
    NoCandidates(String),
    #[error("no candidate passed verification")]
    NoVerifiedCandidate,
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
