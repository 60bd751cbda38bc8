use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode space: {0}")]
    InvalidSpace(String),

    #[error("level out of bounds: level {level} > level cutoff {cutoff}")]
    LevelOutOfBounds { level: usize, cutoff: usize },

    #[error("operator dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid operator entry at ({row}, {col}): {reason}")]
    InvalidEntry {
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("operator is not the adjoint of its partner (max deviation {deviation:e})")]
    AdjointMismatch { deviation: f64 },

    #[error("eigenfunction order overflow: n = {order} exceeds maximum {max}")]
    EigenfunctionOrderOverflow { order: usize, max: usize },

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("mixing angle outside hyperbolic domain: |gamma| = {0} >= pi/4")]
    MixingAngleOutOfDomain(f64),

    #[error("negative rate ratio: {0}")]
    NegativeRatio(f64),

    #[error("insufficient truncation headroom: {0}")]
    InsufficientHeadroom(String),

    #[error("below pair-creation threshold: hbar*omega = {photon_energy:e} J <= 2mc^2 = {pair_energy:e} J")]
    BelowThreshold {
        photon_energy: f64,
        pair_energy: f64,
    },

    #[error("invalid kinematics: {0}")]
    InvalidKinematics(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("fit did not converge after {iterations} iterations")]
    FitNotConverged { iterations: usize },

    #[error("degenerate fit geometry: {0}")]
    DegenerateFit(String),

    #[error("invalid experimental parameter: {0}")]
    InvalidParameter(String),

    #[error("trace parse error at line {line}: {message}")]
    TraceParse { line: usize, message: String },

    #[error("parameter file error: {0}")]
    ParamsFormat(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
