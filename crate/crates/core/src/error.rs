use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin sector: {0}")]
    InvalidSector(String),

    #[error("w = m/S_tot is undefined for S_tot = 0")]
    UndefinedPolarization,

    #[error("unsupported drive schedule: {0}")]
    UnsupportedSchedule(String),

    #[error("invalid drive schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {t} lies outside the schedule span [0, {span}]")]
    OutOfRange { t: f64, span: f64 },

    #[error("{what}: {value} is outside {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("degenerate distribution: width must be positive (use a point mass)")]
    DegenerateDistribution,

    #[error("lattice of {0} sites exceeds the dense-oracle cap of {max} sites", max = crate::exact_lattice::MAX_SITES)]
    TooManySites(usize),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator has no local-term decomposition")]
    MissingDecomposition,

    #[error("decomposition check failed: {0}")]
    DecompositionMismatch(String),

    #[error("state norm {0} deviates from 1")]
    NotNormalized(f64),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("enumeration over {0} sites exceeds the cap")]
    EnumerationTooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data for liquid {liquid}: {rows} rows retained, at least 3 required")]
    InsufficientData { liquid: String, rows: usize },

    #[error("quadrature did not converge: estimated error {error:e} after {evaluations} evaluations")]
    Quadrature { error: f64, evaluations: usize },

    #[error("curve undefined at {0}")]
    CurveUndefined(f64),

    #[error("kernel is not normalizable: {0}")]
    InvalidKernel(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
