use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("factor {index} has negative support; the Hermitized product needs nonnegative factors")]
    UnsupportedFactorSign { index: usize },

    #[error("correlation matrix is singular")]
    SingularCorrelation,

    #[error("empirical tau is only available for iid transmitters (transmitter {index} is isometric)")]
    UnsupportedDiagnostic { index: usize },

    #[error(transparent)]
    Core(#[from] stieltjes_core::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
