use thiserror::Error;

/// Errors surfaced by signal operations, reconstruction methods, and file IO.
#[derive(Debug, Error)]
pub enum MraError {
    #[error("zero reference signal")]
    ZeroReferenceSignal,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate discriminant: shifts {i} and {j} coincide")]
    DegenerateDiscriminant { i: usize, j: usize },

    #[error("insufficient signal: no informative bispectrum entries for frequency {freq}")]
    InsufficientSignal { freq: usize },

    #[error("grid requires 2-torus: signal has {found} supported frequencies, need exactly 2")]
    GridRequiresTwoTorus { found: usize },

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error("parse error in {context}: {detail}")]
    Parse { context: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MraError>;
