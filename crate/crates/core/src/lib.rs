//! Semgraph meaning representations end to end: categorial-grammar parsing to
//! atom matches, graph unification by parallel composition, and truth
//! evaluation against finite possible-worlds models.

pub mod error;
pub mod graph;
pub mod types;
pub mod model;
pub mod eval;
pub mod ccg;
pub mod tlg;
pub mod composer;
pub mod resolver;

pub use error::{Error, Result};
pub use graph::{EdgeLabel, EdgeRef, GraphBuilder, Path, Semgraph, VertexId};
pub use types::{AtomName, Connective, SynType, Tone};
