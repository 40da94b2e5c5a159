use thiserror::Error;

/// Every failure mode surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("incompatible cyclotomic orders {0} and {1}")]
    IncompatibleField(u32, u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("path tracking failed: {0}")]
    PathCrossing(String),

    #[error("degenerate base point: {0}")]
    DegenerateBase(String),

    #[error("monodromy group exceeds {bound} elements")]
    GroupTooLarge { bound: usize },

    #[error("unsupported subgroup pair: {0}")]
    UnsupportedPair(String),

    #[error("linear system is not uniquely solvable: {0}")]
    SingularSystem(String),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("histogram grids differ: {0:?} vs {1:?}")]
    GridMismatch((usize, usize), (usize, usize)),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("malformed JSON at line {line}, column {column}: {msg}")]
    MalformedJson {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("invalid coefficient in `{field}`: {msg}")]
    InvalidCoefficient { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image encoding: {0}")]
    Image(String),
}

impl Error {
    /// True for failures of the numeric kernels rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_)
                | Error::PathCrossing(_)
                | Error::DegenerateBase(_)
                | Error::Certification(_)
                | Error::Sampling(_)
                | Error::GroupTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
