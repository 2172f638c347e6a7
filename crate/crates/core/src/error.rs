use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Probability mass drifted during density propagation.
    #[error("density mass {mass} after stage {stage} deviates from 1")]
    MassDrift { stage: usize, mass: f64 },

    /// No multiplier bracket around the energy budget could be found.
    #[error("calibration infeasible: {0}")]
    Infeasible(String),

    /// The bracket collapsed without meeting the energy tolerance.
    #[error("calibration stalled at lambda={lambda}: energy {energy} vs budget {budget}")]
    Stalled { lambda: f64, energy: f64, budget: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the `fbdp` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::Stalled { .. } | Error::MassDrift { .. } => 2,
            Error::Parse { .. } => 4,
            Error::DimensionMismatch(_) | Error::InvalidGrid(_) | Error::InvalidConfig(_) => 5,
            Error::Io(_) => 1,
        }
    }
}
