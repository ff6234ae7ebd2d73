use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("half-dimension n must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("expected {expected} realization")]
    RealizationMismatch { expected: &'static str },

    #[error("matrix is not hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not anti-hermitian (residual {residual:e})")]
    NotAntiHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("singular matrix: {what}")]
    Singular { what: &'static str },

    #[error("constraint violated: {what} (residual {residual:e})")]
    Constraint { what: &'static str, residual: f64 },

    #[error("invalid orbit label: k + l = {sum} exceeds n = {n}")]
    InvalidLabel { sum: usize, n: usize },

    #[error("expected a rank-one positive semidefinite matrix, found rank {rank}")]
    RankViolation { rank: usize },

    #[error("negative eigenvalue {value:e} in a matrix required to be positive semidefinite")]
    NegativeEigenvalue { value: f64 },

    #[error("twistor is not null (invariant {value:e})")]
    NotNull { value: f64 },

    #[error("lower spinor component vanishes")]
    ZeroSpinor,

    #[error("zero modulus in component {index}; angles are undefined")]
    ZeroModulus { index: usize },

    #[error("reconstructed squared modulus {value:e} in component {index} is negative")]
    DomainViolation { index: usize, value: f64 },

    #[error("exponents do not satisfy the integrability condition in rows {rows:?}")]
    NotIntegrable { rows: Vec<usize> },

    #[error("exponents are not closed under negation: {0}")]
    UnpairedExponents(String),

    #[error("radicand {value:e} is negative at the initial state")]
    NegativeRadicand { value: f64 },

    #[error("no turning point found while searching from I1 = {from}")]
    NoTurningPoint { from: f64 },

    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expression error: {0}")]
    Expression(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
