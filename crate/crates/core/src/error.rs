use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("tail exponent {0} does not exceed 1, series tail diverges")]
    DivergentTail(f64),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("series did not reach tolerance at truncation {truncation} (tail bound {bound:e})")]
    NotConverged { truncation: usize, bound: f64 },
    #[error("series term evaluated to a non-finite value")]
    NonFiniteTerm,
    #[error("empty search grid [{lo}, {hi}] with {points_per_decade} points per decade")]
    EmptyGrid {
        lo: f64,
        hi: f64,
        points_per_decade: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("flux {0} lies within 1e-9 of an integer")]
    IntegerFlux(f64),
    #[error("flux must be finite, got {0}")]
    NonFiniteFlux(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid potential: {0}")]
    Potential(String),
    #[error("flux of magnetic potential is {0}, within 1e-9 of an integer")]
    IntegerFlux(f64),
    #[error("basis of dimension {0} exceeds the limit of 20000")]
    DimensionOverflow(usize),
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("eigenpair residual {residual:e} exceeds {limit:e}")]
    Residual { residual: f64, limit: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("potential takes negative values (min {min:e}); refusing to certify")]
    NegativePotential { min: f64 },
    #[error(
        "family is not orthonormal: Gram entry ({row}, {col}) = {value} (deviation {deviation:e})"
    )]
    NotOrthonormal {
        row: usize,
        col: usize,
        value: String,
        deviation: f64,
    },
    #[error("gamma must be at least 1, got {0}")]
    Gamma(f64),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}
