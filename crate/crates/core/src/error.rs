use thiserror::Error;

/// Errors raised by measure construction, transform evaluation and the
/// fixed-point solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("joint measure would have {atoms} atoms, above the cap of {cap}")]
    MeasureTooLarge { atoms: u128, cap: usize },

    #[error("transform argument must lie in the open upper half-plane, got {re} + {im}i")]
    InvalidPoint { re: f64, im: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Stieltjes inversion failed at x = {x}: {reason}")]
    InversionFailed { x: f64, reason: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("measure {index} has all of its mass at zero")]
    DegenerateMeasure { index: usize },

    #[error("two admissible starts reached fixed points {gap:e} apart")]
    AmbiguousFixedPoint { gap: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("pole in transform evaluation")]
    EvaluationPole,

    #[error("-noise variance lies at or near the limiting spectrum: |Im rho| = {im_rho:e} exceeds {bound:e}")]
    SpectralEdge { im_rho: f64, bound: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("grid point {index}: {source}")]
    AtGridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("product chain link {index}: {source}")]
    AtChainLink {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_point(index: usize, source: Error) -> Self {
        Error::AtGridPoint { index, source: Box::new(source) }
    }

    /// Strips grid/chain position wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } | Error::AtChainLink { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self.root(), Error::NonConvergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
