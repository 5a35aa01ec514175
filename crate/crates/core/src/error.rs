use thiserror::Error;

/// Errors produced by the library.
///
/// Budget refusals and theorem violations are kept as distinct variants so
/// front ends can map them to different exit statuses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("field size {p}^{e} exceeds the configured bound {bound}")]
    FieldTooLarge { p: u64, e: u32, bound: u64 },

    #[error("field context mismatch: {left} vs {right}")]
    ContextMismatch { left: String, right: String },

    #[error("inversion of zero")]
    ZeroInverse,

    #[error("cannot embed {src} into {dst}: {reason}")]
    IncompatibleEmbedding {
        src: String,
        dst: String,
        reason: String,
    },

    #[error("base must be at least 2, got {0}")]
    InvalidBase(u64),

    #[error("invalid digit permutation: {0}")]
    InvalidPermutation(String),

    #[error(
        "enumeration budget exceeded at degree d = {d}: q^d = {count} monic polynomials, budget is {budget} \
         (raise it with --budget)"
    )]
    BudgetExceeded { d: u64, count: String, budget: u64 },

    #[error("expanding the result would produce {terms} terms, above the limit of {limit}")]
    ExpansionTooLarge { terms: String, limit: u64 },

    #[error("variable index {index} out of range for {num_vars} variables")]
    VarOutOfRange { index: usize, num_vars: usize },

    #[error("arity mismatch: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },

    #[error("malformed substitution: {0}")]
    MalformedSubstitution(String),

    #[error("the zero polynomial has no finite multiplicity")]
    ZeroPolynomial,

    #[error("exponent overflow: {0}")]
    ExponentOverflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("THEOREM VIOLATION ({theorem}): {detail}")]
    TheoremViolation { theorem: String, detail: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn violation(theorem: &str, detail: impl Into<String>) -> Self {
        Error::TheoremViolation {
            theorem: theorem.to_string(),
            detail: detail.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::ExpansionTooLarge { .. }
        )
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Error::TheoremViolation { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
