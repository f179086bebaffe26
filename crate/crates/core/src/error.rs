use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("s is not injective: half-edges {0} and {1} share edge {2}")]
    NonInjectiveS(String, String, String),
    #[error("tau has a fixed point at edge {0}")]
    FixedPointInTau(String),
    #[error("tau is not an involution at edge {0}")]
    TauNotInvolutive(String),
    #[error("undeclared id {0}")]
    DanglingId(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("square does not commute: {0}")]
    NotCommuting(String),
    #[error("not a local bijection at vertex {0}")]
    NotLocallyBijective(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("edge {0} is not a port")]
    NotAPort(String),
    #[error("port {0} is used twice")]
    RepeatedPort(String),
    #[error("invalid graph of graphs: {0}")]
    InvalidGraphOfGraphs(String),
    #[error("search bounds too large: {0}")]
    BoundsTooLarge(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("vertex {0} has valency {1}, above the species bound {2}")]
    ValencyOutOfRange(String, usize, usize),
    #[error("colour mismatch: {0}")]
    ColourMismatch(String),
    #[error("vertex {0} is neither bivalent nor isolated")]
    NotDeletable(String),
    #[error("out of bounds: {0}")]
    OutOfBounds(String),
    #[error("kleisli morphisms do not compose: {0}")]
    Mismatch(String),
    #[error("corpus is not closed under elements: {0}")]
    CorpusNotElementClosed(String),
    #[error("invalid species or algebra: {0}")]
    InvalidSpecies(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
