use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    InvalidVertex(VertexId),
    #[error("edge {0} is not in the graph")]
    InvalidEdge(String),
    #[error("source label {0} already in use")]
    DuplicateSource(i64),
    #[error("vertex {0} is not a source")]
    NotASource(VertexId),
    #[error("simplicity violated: {0}")]
    NotSimple(String),
    #[error("composition conflict: {0}")]
    CompositionConflict(String),
    #[error("bad edge label `{0}`")]
    BadLabel(String),
    #[error("type syntax: {0}")]
    TypeSyntax(String),
    #[error("malformed coordinative type: {0}")]
    ToneShape(String),
    #[error("sort must be positive, got {0}")]
    BadSort(i64),
    #[error("valuation undefined on vertex {0}")]
    UndefinedVertex(VertexId),
    #[error("uninterpretable graph: {0}")]
    Uninterpretable(String),
    #[error("malformed quantification at vertex {0}")]
    MalformedQuantification(VertexId),
    #[error("malformed coordination at vertex {0}")]
    MalformedCoordination(VertexId),
    #[error("model: {0}")]
    Model(String),
    #[error("structural mismatch between {0} and {1}")]
    Mismatch(String, String),
    #[error("sequent syntax: {0}")]
    SequentSyntax(String),
    #[error("no lexical entry for {0}")]
    LexiconMiss(String),
    #[error("unresolved referent: token {0}, source {1}")]
    Unresolved(usize, i64),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
