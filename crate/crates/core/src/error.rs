use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    InvalidVertex { vertex: usize, vertex_count: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("edge {0}-{1} is not in the graph")]
    MissingEdge(usize, usize),

    #[error("weight must be strictly positive, got {0}")]
    NonPositiveWeight(String),

    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("activity must be positive (real part positive for complex), got {0}")]
    InvalidActivity(String),

    #[error("graph has {vertex_count} vertices; exact computation on non-forest graphs is capped at {cap}")]
    SizeCap { vertex_count: usize, cap: usize },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("graph is not a tree")]
    NotATree,

    #[error("invalid offspring distribution: {0}")]
    InvalidDistribution(String),

    #[error("offspring distribution has zero mean")]
    ZeroMean,

    #[error("Galton-Watson tree exceeded the vertex cap of {cap}")]
    TreeTooLarge { cap: usize },

    #[error("Erdős–Rényi parameter c = {c} exceeds n = {n}")]
    InvalidErdosRenyi { n: usize, c: f64 },

    #[error("distributions are not a unimodular pair (total variation {tv:e})")]
    NotUnimodular { tv: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
