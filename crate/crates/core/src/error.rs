use thiserror::Error;

/// Errors raised by diagram construction and the operations built on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TiddError {
    #[error("transition table is not in first-occurrence order: expected state {expected}, found {found} at cell {cell}")]
    CanonicalOrderViolation {
        cell: usize,
        expected: u32,
        found: u32,
    },
    #[error("transition table has side {side} but child layer has {child_states} states")]
    ArityMismatch { side: usize, child_states: usize },
    #[error("transition table has {len} entries, which is not a square")]
    NotSquare { len: usize },
    #[error("assignment has length {got}, expected {expected}")]
    AssignmentLengthMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {vars} variables")]
    IndexOutOfRange { index: usize, vars: usize },
    #[error("truth table has {got} entries, expected {expected}")]
    TruthTableLengthMismatch { expected: usize, got: usize },
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("operands have different levels ({left} vs {right})")]
    LevelMismatch { left: u32, right: u32 },
    #[error("operation {op} is not defined on value {value}")]
    ValueDomainError { op: &'static str, value: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("negative weight {0} in sampled diagram")]
    NegativeWeight(String),
    #[error("all sample weights are zero")]
    ZeroDistribution,
    #[error("oracle limited to {limit} variables, got {vars}")]
    OracleScaleLimit { vars: usize, limit: usize },
    #[error("invalid gate: {0}")]
    GateSpecError(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = TiddError> = std::result::Result<T, E>;
