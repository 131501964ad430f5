use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variant names double as the stable identifiers printed by the CLI and
/// written into the `status` column of failed sweep cells.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not reach tolerance after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NonConvergent {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },
    #[error("non-finite value {value} encountered at {at}")]
    NonFinite { at: f64, value: f64 },
    #[error("tail mass bound {bound:e} outside the truncation radius exceeds {limit:e}")]
    InsufficientTailRadius { bound: f64, limit: f64 },
    #[error("numeric CDF is not increasing near z = {at}")]
    NonMonotoneCdf { at: f64 },
    #[error("polynomial degree {degree} is odd")]
    OddDegree { degree: usize },
    #[error("polynomial degree {degree} is below 2")]
    DegreeTooLow { degree: usize },
    #[error("leading coefficient {coefficient} must be negative")]
    NonNegativeLeadingCoefficient { coefficient: f64 },
    #[error("normalizing constant could not be computed: {reason}")]
    NormalizationFailure { reason: String },
    #[error("derivative order {order} is not supported (expected 1, 2 or 3)")]
    UnsupportedOrder { order: usize },
    #[error("t = {t} is below the validity radius {radius} of the tail bound")]
    BelowValidityRadius { t: f64, radius: f64 },
    #[error("budget k = {k} is too large for d = {d} (need 2k < d)")]
    BudgetTooLarge { k: usize, d: usize },
    #[error("could not find an extreme sample reaching the required score margin")]
    ExtremeSearchFailed,
    #[error("brute-force oracle limited to d <= 12 and k <= 2 (got d = {d}, k = {k})")]
    InstanceTooLarge { d: usize, k: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable short name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonConvergent { .. } => "NonConvergent",
            Error::NonFinite { .. } => "NonFinite",
            Error::InsufficientTailRadius { .. } => "InsufficientTailRadius",
            Error::NonMonotoneCdf { .. } => "NonMonotoneCDF",
            Error::OddDegree { .. } => "OddDegree",
            Error::DegreeTooLow { .. } => "DegreeTooLow",
            Error::NonNegativeLeadingCoefficient { .. } => "NonNegativeLeadingCoefficient",
            Error::NormalizationFailure { .. } => "NormalizationFailure",
            Error::UnsupportedOrder { .. } => "UnsupportedOrder",
            Error::BelowValidityRadius { .. } => "BelowValidityRadius",
            Error::BudgetTooLarge { .. } => "BudgetTooLarge",
            Error::ExtremeSearchFailed => "ExtremeSearchFailed",
            Error::InstanceTooLarge { .. } => "InstanceTooLarge",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
