use thiserror::Error;

/// Errors raised by oracles, constructors and schemes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element {id} is out of range for a ground set of size {n}")]
    ElementOutOfRange { id: usize, n: usize },
    #[error("element {0} is not part of the minor's ground set")]
    RemovedElement(usize),
    #[error("contract and delete sets overlap at element {0}")]
    MinorOverlap(usize),
    #[error("element {0} is a loop")]
    Loop(usize),
    #[error("{what} too large: {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("point lies outside the scaled polytope; violated on {subset:?}")]
    OutsidePolytope { subset: Vec<usize> },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("z_{index} is negative for n = {n} (smallest feasible n: {smallest_feasible:?})")]
    NegativeSolution {
        n: usize,
        index: usize,
        smallest_feasible: Option<usize>,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sets {0:?} and {1:?} cross, family is not laminar")]
    NotLaminar(Vec<usize>, Vec<usize>),
    #[error("chain construction stalled at level {level}: every remaining element exceeds the 2b span threshold ({elements:?})")]
    ChainStall { level: usize, elements: Vec<usize> },
    #[error("vertex {vertex} has degree {degree} < 3 after parallel-class reduction")]
    LowDegree { vertex: usize, degree: usize },
    #[error("max flow {value} is below the required {required}; violating left set {subset:?}")]
    FlowDeficit {
        value: String,
        required: String,
        subset: Vec<usize>,
    },
    #[error("no element satisfies the overflow bound at step {step} (best {best})")]
    NoQualifyingElement { step: usize, best: String },
    #[error("invalid decomposition: {}", .0.join("; "))]
    InvalidDecomposition(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
