use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("partition parts must be nonincreasing (part {index} = {value} < next part {next})")]
    NonIncreasingViolation { index: usize, value: i64, next: i64 },
    #[error("partition part {index} = {value} is not positive")]
    NonPositivePart { index: usize, value: i64 },
    #[error("partition {parts:?} is not even")]
    NotEvenPartition { parts: Vec<u32> },

    #[error("degree {n} is not admissible for partition {parts:?}")]
    InadmissibleDegree { n: usize, parts: Vec<u32> },
    #[error("constructed polynomial has degree {got}, expected {expected}")]
    DegreeMismatch { expected: usize, got: i64 },

    #[error("root iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("expected {expected_regular} regular and {expected_exceptional} exceptional zeros, found {regular} and {exceptional}")]
    CountMismatch { expected_regular: usize, expected_exceptional: usize, regular: usize, exceptional: usize },
    #[error("exceptional zero {index} has no unambiguous nearest zero of H (distance ratio {ratio:.4})")]
    MatchingAmbiguous { index: usize, ratio: f64 },
    #[error("exceptional zero {index} coincides with its zero of H to working precision")]
    DegenerateDistance { index: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("points {i} and {j} coincide")]
    CoincidentPoints { i: usize, j: usize },
    #[error("point {index} sits on a pole of the weight")]
    PointAtPoleOfW { index: usize },
    #[error("exceptional zero {index} is real; Hessian formulas degenerate")]
    RealExceptionalZero { index: usize },

    #[error("block partition does not match a {dim}x{dim} matrix")]
    PartitionMismatch { dim: usize },
    #[error("diagonal block {block} is singular")]
    SingularBlock { block: usize },
    #[error("matrix is not symmetric (entry ({i},{j}))")]
    NotSymmetric { i: usize, j: usize },
    #[error("block structure must be 2x2 exceptional blocks followed by 1x1 blocks")]
    BlockShapeMismatch,

    #[error("d_nu vanishes at the evaluation point")]
    PoleOfDnu,
    #[error("evaluation point too close to a pole")]
    PoleProximity,

    #[error("power-law fit needs at least {needed} positive points, got {got}")]
    DegenerateFit { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
