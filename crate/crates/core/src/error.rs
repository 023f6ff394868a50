use thiserror::Error;

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("index {index} out of range for {what} (bound {bound})")]
    IndexOutOfRange { what: &'static str, index: usize, bound: usize },
    #[error("off-diagonal generator requires i != j (got e[{0},{0}])")]
    DiagonalOffDiag(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid numeric literal `{0}`")]
    InvalidLiteral(String),
    #[error("expected an element of degree <= 1 without constant term")]
    NotDegreeOne,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("block parameter p = {p} out of range for d = {d}")]
    BlockParameter { d: usize, p: usize },
    #[error("family `{kind}` is incompatible with p = {p}")]
    IncompatibleFamily { kind: &'static str, p: usize },
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("degree bound {bound} is below the smallest generator degree {min}")]
    BoundTooSmall { bound: u32, min: u32 },
    #[error("target degree {degree} exceeds the basis bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },
    #[error("word enumeration exceeds the cap of {0} products")]
    EnumerationCap(usize),
    #[error("representation dimension {dim} exceeds the size cap {cap}")]
    SizeCapExceeded { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl AlgebraError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            AlgebraError::RankMismatch(..) => "rank_mismatch",
            AlgebraError::IndexOutOfRange { .. } => "index_out_of_range",
            AlgebraError::DiagonalOffDiag(_) => "index_out_of_range",
            AlgebraError::DivisionByZero => "division_by_zero",
            AlgebraError::InvalidLiteral(_) => "invalid_literal",
            AlgebraError::NotDegreeOne => "not_degree_one",
            AlgebraError::SingularMatrix => "singular_matrix",
            AlgebraError::BlockParameter { .. } => "block_parameter",
            AlgebraError::IncompatibleFamily { .. } => "incompatible_family",
            AlgebraError::EmptyGenerators => "empty_generators",
            AlgebraError::BoundTooSmall { .. } => "bound_too_small",
            AlgebraError::DegreeOverflow { .. } => "degree_overflow",
            AlgebraError::EnumerationCap(_) => "enumeration_cap",
            AlgebraError::SizeCapExceeded { .. } => "size_cap_exceeded",
            AlgebraError::DimensionMismatch { .. } => "dimension_mismatch",
            AlgebraError::InvalidGrid(_) => "invalid_grid",
            AlgebraError::InvalidArgument(_) => "invalid_argument",
            AlgebraError::Parse { .. } => "parse_error",
            AlgebraError::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for AlgebraError {
    fn from(e: std::io::Error) -> Self {
        AlgebraError::Io(e.to_string())
    }
}
