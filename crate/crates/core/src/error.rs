use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("not a p^{0}-th power")]
    NotAPower(u32),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("operator order {order} exceeds the height budget bound {bound}")]
    OrderBudgetExceeded { order: u64, bound: u64 },
    #[error("the zero operator has no order")]
    ZeroOperator,
    #[error("operator is not nilpotent within {0} p-th power steps")]
    NotNilpotentWithinBudget(u32),
    #[error("operator is not a derivation")]
    NotADerivation,
    #[error("operator order {order} is not below p^{level}")]
    OrderTooHighForLevel { order: u64, level: u32 },
    #[error("height {height} exceeds the height budget {budget}")]
    HeightBudgetExceeded { height: u32, budget: u32 },
    #[error("no Cartier dual is known for this descriptor")]
    UnsupportedDual,
    #[error("group scheme is not commutative")]
    NotCommutative,
    #[error("unsupported descriptor: {0}")]
    UnsupportedDescriptor(String),
    #[error("equation has no solution")]
    NoSolution,
    #[error("system is incompatible")]
    Incompatible,
    #[error("canonical block order check failed: expected p^{expected}, got {got}")]
    OrderAssertionFailed { expected: u32, got: u64 },
    #[error("dimension too small: need {needed} variables, have {available}")]
    DimensionTooSmall { needed: usize, available: usize },
    #[error("extension obstruction: {0}")]
    ExtensionObstruction(String),
    #[error("multiplier rows are linearly dependent over F_p")]
    DependentMultipliers,
    #[error("no candidate derivation escapes the span at row {0}")]
    JoinInfeasible(usize),
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("mismatched fields")]
    FieldMismatch,
}

impl Error {
    /// Malformed input (exit code 2) as opposed to a mathematical verdict (exit code 1).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Invalid(_)
                | Error::FieldMismatch
                | Error::UnsupportedDescriptor(_)
                | Error::UnsupportedDual
                | Error::HeightBudgetExceeded { .. }
                | Error::ZeroDenominator
                | Error::NotSupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
