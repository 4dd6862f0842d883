use thiserror::Error;

/// Errors surfaced by the library. Parse errors carry positions; numerical
/// errors name the quantity that went wrong so the CLI can report it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not multihomogeneous: {0}")]
    InhomogeneousInput(String),

    #[error("relation is not multihomogeneous: {0}")]
    InhomogeneousRelation(String),

    #[error("subspace pieces belong to different rings")]
    RingMismatch,

    #[error("negative exponent {0} in subspace power")]
    NegativeExponent(String),

    #[error("window extent {extent:?} too small for degree cap {cap}")]
    WindowTooSmall { extent: Vec<usize>, cap: usize },

    #[error("no stabilization: function did not become polynomial up to origin {max_origin} ({context})")]
    NoStabilization { max_origin: i64, context: String },

    #[error("non-integral normalized leading coefficient at {beta}: {value}")]
    NonIntegralLeadingCoefficient { beta: String, value: String },

    #[error("negative normalized leading coefficient at {beta}: {value}")]
    NegativeLeadingCoefficient { beta: String, value: String },

    #[error("certified fit has total degree {total} above the bound {bound}")]
    DegreeBoundExceeded { total: i64, bound: i64 },

    #[error("containment violated: {0}")]
    ContainmentViolation(String),

    #[error("stabilization mismatch: {0}")]
    StabilizationMismatch(String),

    #[error("negative exceptional multidegree at {slot}: {value}")]
    NegativeExceptionalDegree { slot: String, value: i64 },

    #[error("criteria routes disagree: {0}")]
    CriteriaDisagreement(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("undeclared name `{0}`")]
    UndeclaredName(String),

    #[error("oracle size bound exceeded: degree weight {weight} > {bound}")]
    SizeBound { weight: i64, bound: i64 },

    #[error("{0}")]
    Invalid(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Stable machine-readable tag for the JSON error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InhomogeneousInput(_) => "InhomogeneousInput",
            Error::InhomogeneousRelation(_) => "InhomogeneousRelation",
            Error::RingMismatch => "RingMismatch",
            Error::NegativeExponent(_) => "NegativeExponent",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::NoStabilization { .. } => "NoStabilization",
            Error::NonIntegralLeadingCoefficient { .. } => "NonIntegralLeadingCoefficient",
            Error::NegativeLeadingCoefficient { .. } => "NegativeLeadingCoefficient",
            Error::DegreeBoundExceeded { .. } => "DegreeBoundExceeded",
            Error::ContainmentViolation(_) => "ContainmentViolation",
            Error::StabilizationMismatch(_) => "StabilizationMismatch",
            Error::NegativeExceptionalDegree { .. } => "NegativeExceptionalDegree",
            Error::CriteriaDisagreement(_) => "CriteriaDisagreement",
            Error::Parse { .. } => "ParseError",
            Error::UndeclaredName(_) => "UndeclaredName",
            Error::SizeBound { .. } => "SizeBound",
            Error::Invalid(_) => "Invalid",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
