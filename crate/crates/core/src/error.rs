use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed scalar `{0}`")]
    Scalar(String),
    #[error("malformed quaternion `{0}`")]
    Quaternion(String),
    #[error("malformed matrix: {0}")]
    Matrix(String),
    #[error("malformed set file: {0}")]
    Set(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("element {0} has no inverse")]
    NonInvertibleElement(String),
    #[error("ratio profile is empty")]
    EmptyProfile,
    #[error("need at least two ratios for a nearest-neighbour map, got {0}")]
    DegenerateR(usize),
    #[error("x and y must be distinct")]
    EqualRatios,
    #[error("y - x is not invertible")]
    NotInvertibleDifference,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enclosure could not resolve {0} at the floor width")]
    Unresolved(String),
    #[error("center {y} lies strictly inside the ball around {x}")]
    CenterSeparationViolated { x: String, y: String },
    #[error("every center coincides with the common point")]
    DegenerateAllCentersEqualP,
    #[error("condition number bound violated by {0}")]
    CondBoundViolated(String),
    #[error("certificate mismatch in field `{0}`")]
    Mismatch(String),
    #[error("bad generator spec: {0}")]
    BadSpec(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
