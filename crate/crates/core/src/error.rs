use std::path::PathBuf;

/// Errors produced anywhere in the weighting pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed {what} document: {source}")]
    Document {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },

    #[error("skeleton has no keypoints")]
    EmptySkeleton,

    #[error("keypoint name at index {index} is empty")]
    EmptyName { index: usize },

    #[error("duplicate keypoint name `{name}`")]
    DuplicateName { name: String },

    #[error("unknown keypoint `{name}` in {context}")]
    UnknownKeypoint { name: String, context: String },

    #[error("edge ({a}, {b}) refers to a keypoint index outside 0..{n}")]
    DanglingIndex { a: usize, b: usize, n: usize },

    #[error("self-loop on keypoint `{name}`")]
    SelfLoop { name: String },

    #[error("duplicate edge {a} - {b}")]
    DuplicateEdge { a: String, b: String },

    #[error("skeleton is disconnected: keypoint `{name}` is unreachable from `{root}`")]
    Disconnected { root: String, name: String },

    #[error(
        "invalid crafted multiplier {value} for keypoint `{name}` (must be positive and finite)"
    )]
    InvalidMultiplier { name: String, value: f64 },

    #[error("no length supplied for edge {a} - {b}")]
    MissingEdge { a: String, b: String },

    #[error("length supplied for {a} - {b}, which is not a skeleton edge")]
    ExtraEdge { a: String, b: String },

    #[error("invalid length {value} for edge {a} - {b} (must be positive and finite)")]
    InvalidLength { a: String, b: String, value: f64 },

    #[error("annotation {id}: expected {expected} keypoint values, found {found}")]
    KeypointCountMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("annotation {id}: invalid visibility flag {value} for keypoint `{keypoint}`")]
    InvalidVisibility {
        id: String,
        keypoint: String,
        value: f64,
    },

    #[error("annotation {id}: non-finite coordinate for labeled keypoint `{keypoint}`")]
    NonFiniteCoordinate { id: String, keypoint: String },

    #[error("annotation {id}: scale-normalized averaging requires a bbox with positive area")]
    MissingBbox { id: String },

    #[error("annotation corpus is empty")]
    EmptyCorpus,

    #[error("no edge is covered by any annotated instance")]
    NoCoveredEdges,

    #[error(
        "edge {a} - {b} is not covered by any annotated instance and no fallback length was given"
    )]
    UncoveredEdge { a: String, b: String },

    #[error("all covered edges have zero mean length")]
    DegenerateLengths,

    #[error("vertex index {index} out of range for graph with {n} vertices")]
    InvalidVertex { index: usize, n: usize },

    #[error("all-pairs oracle is limited to {limit} vertices, graph has {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("harmonic centrality of `{name}` is zero within scope {scope}")]
    DegenerateCentrality { name: String, scope: String },

    #[error("vertex `{name}` cannot reach every vertex of scope {scope}")]
    DisconnectedScope { name: String, scope: String },

    #[error("weight normalization failed: {0}")]
    Normalization(String),

    #[error("probability {value} outside the open interval (0, 1)")]
    ProbabilityOutOfRange { value: f64 },

    #[error("confidence target must be 0 or 1, got {value}")]
    InvalidTarget { value: f64 },

    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("focal exponent must be non-negative and finite, got {value}")]
    InvalidGamma { value: f64 },

    #[error("no weight for keypoint type {index}")]
    MissingWeight { index: usize },

    #[error("weight table does not match graph: {0}")]
    TableMismatch(String),

    #[error("layout has no coordinate for keypoint `{name}`")]
    MissingCoordinate { name: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn document(what: &'static str) -> impl FnOnce(serde_json::Error) -> Error {
        move |source| Error::Document { what, source }
    }
}
