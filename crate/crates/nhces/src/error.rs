use thiserror::Error;

/// Errors produced by the demand-system routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("M diverges")]
    MDiverges,
    #[error("quadrature grid requires degenerate noise")]
    QuadratureRequiresDegenerateNoise,
    #[error("expenditure overflow")]
    ExpenditureOverflow,
    #[error("inversion bracket failure")]
    InversionBracketFailure,
    #[error("utility outside attainable range")]
    UtilityOutsideAttainableRange,
    #[error("moment does not exist")]
    MomentDoesNotExist,
    #[error("degenerate Euler exponent")]
    DegenerateEulerExponent,
    #[error("Euler bracket failure: {0}")]
    EulerBracketFailure(String),
    #[error("simulation requires substitutes case (mu > 0)")]
    SimulationRequiresSubstitutes,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
