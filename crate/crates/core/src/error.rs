use thiserror::Error;

/// Errors raised by the field library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfieldError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mode index {index} out of range (universe has {count} modes)")]
    ModeOutOfRange { index: usize, count: usize },

    #[error("states belong to different mode universes")]
    UniverseMismatch,

    #[error(
        "probe state reaches the truncation cap ({n_max}); commutator identity does not hold there"
    )]
    ProbeAtCap { n_max: u32 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("truncation loss {loss:e} exceeds budget {budget:e}; need n_max >= {required_n_max}")]
    TruncationBudget {
        loss: f64,
        budget: f64,
        required_n_max: u32,
    },

    #[error("incommensurate quadrature window: {0}")]
    Incommensurate(String),

    #[error("sampling window too small: {0}")]
    WindowTooSmall(String),

    #[error("invalid mode label `{0}`")]
    InvalidLabel(String),

    #[error("wave vector must be nonzero")]
    ZeroWaveVector,

    #[error("operation requires a {expected} mode universe")]
    WrongUniverse { expected: &'static str },

    #[error("{path}: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, QfieldError>;
