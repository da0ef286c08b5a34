use thiserror::Error;

use crate::fields::FieldElement;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("Phi is not invertible")]
    SingularPhi,
    #[error("involution axiom violated: {0}")]
    InvolutionAxiomViolation(String),
    #[error("epsilon = -1 is only allowed for a split algebra with the identity involution on F")]
    IllegalEpsilon,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("form is not epsilon-hermitian")]
    NotHermitian,
    #[error("forms live over different algebras")]
    AlgebraMismatch,
    #[error("pfister and harrison generators must be nonzero")]
    ZeroCoefficient,
    #[error("dimension {dim} is not divisible by {ell}")]
    IndivisibleDimension { dim: usize, ell: usize },
    #[error("element is not invertible")]
    NotInvertible,
    #[error("element is not symmetric")]
    NotSymmetric,
    #[error("form is singular")]
    SingularForm,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("X_sigma is empty")]
    EmptyXSigma,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("matrix is not positive semidefinite: diagonal entry {index} is {entry}")]
    NotPsd { index: usize, entry: FieldElement },
    #[error("trace-form signature {0} is not a perfect square")]
    NotAPerfectSquare(i64),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::InvalidDescriptor(_) => "InvalidDescriptor",
            Error::SingularPhi => "SingularPhi",
            Error::InvolutionAxiomViolation(_) => "InvolutionAxiomViolation",
            Error::IllegalEpsilon => "IllegalEpsilon",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotHermitian => "NotHermitian",
            Error::AlgebraMismatch => "AlgebraMismatch",
            Error::ZeroCoefficient => "ZeroCoefficient",
            Error::IndivisibleDimension { .. } => "IndivisibleDimension",
            Error::NotInvertible => "NotInvertible",
            Error::NotSymmetric => "NotSymmetric",
            Error::SingularForm => "SingularForm",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::EmptyXSigma => "EmptyXSigma",
            Error::MalformedCertificate(_) => "MalformedCertificate",
            Error::NotPsd { .. } => "NotPSD",
            Error::NotAPerfectSquare(_) => "NotAPerfectSquare",
            Error::Internal(_) => "InternalError",
        }
    }

    /// Errors that can only come from a bug, never from bad input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(self, Error::NotAPerfectSquare(_) | Error::Internal(_))
    }
}
