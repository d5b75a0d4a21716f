use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown vertex `{0}`")]
    DanglingVertex(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("not an exact rational: {0}")]
    NonRational(String),
    #[error("quiver is not acyclic; cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("rank-deficient Cholesky input (pivot {pivot} = {value:e})")]
    RankDeficient { pivot: usize, value: f64 },
    #[error("matrix is not positive semidefinite (pivot {pivot} = {value:e})")]
    NotPsd { pivot: usize, value: f64 },
    #[error("singular scaling block at vertex `{0}`")]
    SingularBlock(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("weight is infeasible: sigma(alpha) = {0} != 0")]
    WeightInfeasible(i64),
    #[error("not a subrepresentation: {0}")]
    NotSubrepresentation(String),
    #[error("arc `{0}` does not carry a rank-one matrix")]
    NotRankOne(String),
    #[error("lower-set enumeration over {size} elements exceeds the limit of {limit}")]
    LowerSetLimit { size: usize, limit: usize },
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("malformed branching program: {0}")]
    MalformedAbp(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
