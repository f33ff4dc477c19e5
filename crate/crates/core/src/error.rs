use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid scalar: {0}")]
    InvalidScalar(String),
    #[error("valuation is only defined over p-adic fields")]
    NotPadic,
    #[error("division by zero")]
    DivisionByZero,
    #[error("p-adic precision exhausted")]
    PrecisionExhausted,
    #[error("insufficient p-adic precision: have {have} digits, need {need}")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not in SL_n: |det - 1| = {0:e}")]
    NotSpecialLinear(f64),
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("not contracting: coefficient {coefficient} is not below {bound}")]
    NotContracting { coefficient: f64, bound: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("empty set of transformations")]
    EmptySet,
    #[error("no element of the separating set satisfies: {0}")]
    NoSeparator(String),
    #[error("selection failed at step {step} choosing {role}: {constraint}")]
    SelectionFailure {
        step: usize,
        role: &'static str,
        constraint: String,
    },
    #[error("constructed element failed certification: {0}")]
    CertificationFailed(String),
    #[error("matrix logarithm outside its domain: |g - I| = {0}")]
    OutOfLogDomain(f64),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    /// Errors that come from violated preconditions or precision loss, as
    /// opposed to malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted
                | Error::InsufficientPrecision { .. }
                | Error::NotContracting { .. }
                | Error::Precondition(_)
                | Error::NoSeparator(_)
                | Error::SelectionFailure { .. }
                | Error::CertificationFailed(_)
                | Error::OutOfLogDomain(_)
                | Error::SvdFailed
                | Error::Singular
        )
    }
}
