use thiserror::Error;

use crate::vertex_set::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("empty play prefix")]
    EmptyWord,
    #[error("not a path: no edge from {from} to {to}")]
    NotAPath { from: Vertex, to: Vertex },
    #[error("lasso cycle must be non-empty")]
    EmptyCycle,
    #[error("loop enumeration limited to {limit} vertices, arena has {actual}")]
    TooManyVertices { limit: usize, actual: usize },
    #[error("state limit of {0} exceeded")]
    StateLimit(usize),
    #[error("score sheet already reached the cap; unsafe classes are terminal")]
    TerminalSheet,
    #[error("threshold must be 2 or 3, got {0}")]
    BadThreshold(u32),
    #[error("play prefix crosses the threshold before its last vertex")]
    PrefixBeyondThreshold,
    #[error("class of the given prefix was not constructed")]
    ClassNotFound,
    #[error("condition is not determined by infinity sets")]
    NotInfinitySetDetermined,
    #[error("expected a Muller condition")]
    NotMuller,
    #[error("strategy has no update for memory `{memory}` on vertex {vertex}")]
    UndefinedUpdate { memory: String, vertex: Vertex },
    #[error("strategy has no move at vertex {vertex} with memory `{memory}`")]
    UndefinedMove { memory: String, vertex: Vertex },
    #[error("strategy moves from {from} to non-successor {to}")]
    IllegalMove { from: Vertex, to: Vertex },
    #[error("strategies belong to different players")]
    PlayerMismatch,
    #[error("candidate strategy does not bound the opponent's scores by 2")]
    NotScoreBounding,
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}
