use thiserror::Error;

/// Errors raised by the exact and numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_{modulus})")]
    DivisionByZero { modulus: u32 },

    #[error("non-terminating product: {0}")]
    NonTerminating(String),

    #[error("insufficient truncation: need exponents below {required}, series known below {available}")]
    InsufficientTruncation { required: String, available: String },

    #[error("precision unreachable: {0}")]
    PrecisionUnreachable(String),

    #[error("component {component} is outside its domain at x = {point}: {rule}")]
    OutsideDomain {
        component: String,
        point: String,
        rule: String,
    },

    #[error("component {component} is undefined at x = {point}: {reason}")]
    UndefinedComponent {
        component: String,
        point: String,
        reason: String,
    },

    #[error("denominator vanishes for component {component} at x = {point}: factor {factor}")]
    DenominatorVanishes {
        component: String,
        point: String,
        factor: String,
    },

    #[error("identity check failed: {0}")]
    IdentityFails(String),

    #[error("tolerance not met: error estimate {achieved:e} exceeds {requested:e} at depth {depth}")]
    ToleranceNotMet {
        achieved: f64,
        requested: f64,
        depth: u32,
    },

    #[error("contour passes too close to the singularity at x = {0}")]
    PathTooCloseToSingularity(String),

    #[error("sequence does not have mean value zero over period {period}")]
    NotMeanValueZero { period: u32 },

    #[error("series did not converge within {terms} terms")]
    NonConvergent { terms: usize },

    #[error("fit unstable: {0}")]
    FitUnstable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OutsideDomain { .. } | Error::UndefinedComponent { .. } => 2,
            Error::DenominatorVanishes { .. } | Error::DivisionByZero { .. } => 3,
            Error::ToleranceNotMet { .. } => 4,
            _ => 1,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero { .. } => "DivisionByZero",
            Error::NonTerminating(_) => "NonTerminating",
            Error::InsufficientTruncation { .. } => "InsufficientTruncation",
            Error::PrecisionUnreachable(_) => "PrecisionUnreachable",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::UndefinedComponent { .. } => "UndefinedComponent",
            Error::DenominatorVanishes { .. } => "DenominatorVanishes",
            Error::IdentityFails(_) => "IdentityFails",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::PathTooCloseToSingularity(_) => "PathTooCloseToSingularity",
            Error::NotMeanValueZero { .. } => "NotMeanValueZero",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::FitUnstable(_) => "FitUnstable",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
