use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no nodes")]
    NoNodes,
    #[error("duplicate node id {0}")]
    DuplicateNode(u32),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(String),
    #[error("edge {edge} references unknown node {node}")]
    DanglingEndpoint { edge: String, node: u32 },
    #[error("self-loop on node {0}")]
    SelfLoop(u32),
    #[error("node {0}: {1}")]
    BadAttribute(u32, &'static str),
    #[error("edge {0}: multiplicity must be positive")]
    BadMultiplicity(String),
    #[error("source {source_node} is adjacent to sink {sink} with no junction between them; model the pair directly")]
    IsolatedPair { source_node: u32, sink: u32 },
    #[error("edge {0} joins two terminal nodes of the same kind")]
    TerminalEdge(String),
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("node {0} is not sink-bearing")]
    NotASink(u32),
    #[error("element {0} is not a VB link")]
    NotVb(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("sink {0} has no VB elements")]
    NoVb(u32),
    #[error("sub-topology has {m} elements, above the limit of {limit} (would need {bytes} bytes of records)")]
    TooLarge { m: usize, limit: usize, bytes: u128 },
    #[error("sub-topology has {0} source classes; at most 64 are supported")]
    TooManyClasses(usize),
    #[error("probability {0} outside [0,1]")]
    BadProbability(f64),
    #[error("no database for sub-topology {0}")]
    MissingDatabase(usize),
    #[error("database format: {0}")]
    Format(String),
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("fault set has {got} bits, network has {expected} elements")]
    ScenarioWidth { got: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
