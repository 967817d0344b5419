use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimension {requested} exceeds the configured maximum {max}")]
    DimensionTooLarge { requested: usize, max: usize },

    #[error("matrix is not Hermitian (max |h - h†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unknown state name '{0}'")]
    UnknownState(String),

    #[error("rejection budget of {attempts} attempts exceeded ({detail})")]
    RejectionBudget { attempts: usize, detail: String },

    #[error("{measure} value {value} lies outside its range")]
    MeasureOutOfRange { measure: &'static str, value: f64 },

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
