use thiserror::Error;

pub type Result<T> = std::result::Result<T, RpmError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RpmError {
    #[error("unknown potential model `{0}`")]
    UnknownModel(String),
    #[error("potential `{model}` requires parameter `{param}`")]
    MissingParameter { model: String, param: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series order must be at least {min}, got {got}")]
    OrderTooLow { min: usize, got: usize },
    #[error("potential coefficient V_{index} unavailable (series truncated at order {available})")]
    MissingCoefficient { index: usize, available: usize },
    #[error("series reciprocal needs a nonzero constant term")]
    ZeroConstantTerm,
    #[error("precision of {0} digits is below the 20-digit floor")]
    PrecisionTooLow(u32),
    #[error("potential has a constant term; apply shift_constant first")]
    UnshiftedPotential,
    #[error("symbolic parameter `{0}` must be bound for numeric evaluation")]
    UnboundSymbol(String),
    #[error("parameter `{0}` does not enter the potential linearly")]
    NonlinearParameter(String),
    #[error("symbolic evaluation supports at most one parameter")]
    TooManySymbols,
    #[error("need coefficients up to f_{needed}, sequence ends at f_{available}")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("invalid Hankel dimensions: {0}")]
    InvalidHankel(String),
    #[error("symbolic determinant exceeded the term limit of {0}")]
    SymbolicOverflow(usize),
    #[error("determinant guard certified {got} digits, {wanted} requested")]
    GuardFailure { got: u32, wanted: u32 },
    #[error("root search did not converge: {0}")]
    NoConvergence(String),
    #[error("continuation lost at D = {dim}: {reason}")]
    LostContinuation { dim: usize, reason: String },
    #[error("rate fit needs at least 3 positive gaps, got {0}")]
    InsufficientRateData(usize),
    #[error("nonpositive gap at D = {0}")]
    NonpositiveGap(usize),
    #[error("expectation value indeterminate: {0}")]
    Indeterminate(String),
    #[error("observable has no nonzero coefficient")]
    EmptyObservable,
    #[error("Pade construction failed: {0}")]
    SingularPade(String),
    #[error("x = {x} lies beyond the denominator pole at {pole}")]
    BeyondPole { x: f64, pole: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("oracle resolution insufficient: {0}")]
    OracleResolution(String),
    #[error("parse error: {0}")]
    Parse(String),
}
