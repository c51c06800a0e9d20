use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("substitution image for letter '{0}' is empty")]
    EmptyImage(char),
    #[error("unexpected symbol '{symbol}' at byte {offset}; only 'a' and 'b' are letters")]
    BadLetter { symbol: char, offset: usize },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("no legal seed pair with period <= 4 found")]
    NoLegalSeed,
    #[error("substitution matrix is not primitive")]
    NotPrimitive,
    #[error("substitution matrix is not unimodular (det = {det})")]
    NotUnimodular { det: i64 },
    #[error("characteristic polynomial x^2 - {trace}x + {det} has rational roots")]
    DegenerateField { trace: i64, det: i64 },
    #[error("inflation factor is not a Pisot unit")]
    NotPisotUnit,
    #[error("division by zero in Q(lambda)")]
    DivisionByZero,
    #[error("operands belong to different quadratic fields")]
    FieldMismatch,
    #[error("cut-and-project requires interval windows")]
    NonIntervalWindow,
    #[error("endpoint system is singular")]
    SingularSystem,
    #[error("substitution is not invertible over the free group")]
    NotInvertible,
    #[error("boundary graph closure exceeded {0} nodes")]
    ClosureExplosion(usize),
    #[error("boundary graph is empty after pruning")]
    EmptyGraph,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Broad outcome class, used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Internal,
    Rejected,
    Resource,
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyImage(_) => "EMPTY_IMAGE",
            Error::BadLetter { .. } => "BAD_LETTER",
            Error::Syntax(_) => "SYNTAX_ERROR",
            Error::ResourceLimit(_) => "RESOURCE_LIMIT",
            Error::NoLegalSeed => "NO_LEGAL_SEED",
            Error::NotPrimitive => "NOT_PRIMITIVE",
            Error::NotUnimodular { .. } => "NON_UNIMODULAR",
            Error::DegenerateField { .. } => "DEGENERATE_FIELD",
            Error::NotPisotUnit => "NOT_PISOT_UNIT",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::FieldMismatch => "FIELD_MISMATCH",
            Error::NonIntervalWindow => "NON_INTERVAL_WINDOW",
            Error::SingularSystem => "SINGULAR_SYSTEM",
            Error::NotInvertible => "NOT_INVERTIBLE",
            Error::ClosureExplosion(_) => "CLOSURE_EXPLOSION",
            Error::EmptyGraph => "EMPTY_GRAPH",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::Io(_) => "IO_ERROR",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EmptyImage(_)
            | Error::BadLetter { .. }
            | Error::Syntax(_)
            | Error::NoLegalSeed
            | Error::NotPrimitive
            | Error::NotUnimodular { .. }
            | Error::DegenerateField { .. }
            | Error::NotPisotUnit
            | Error::NonIntervalWindow
            | Error::InvalidArgument(_) => ErrorClass::Rejected,
            Error::ResourceLimit(_) | Error::ClosureExplosion(_) => ErrorClass::Resource,
            _ => ErrorClass::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
