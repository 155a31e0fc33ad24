//! The action dependency graph: typed edges over actions, cycle detection,
//! reachability and serialization.

mod closure;
mod export;
mod graph;

use thiserror::Error;

pub use closure::{is_edge_redundant, transitive_closure, ClosureMatrix};
pub use export::{export, from_dot, from_json, import, to_dot, to_json, ExportFormat};
pub use graph::{Adg, DependencyType, Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdgError {
    #[error("graph contains a cycle through nodes {0:?}")]
    Cycle(Vec<NodeId>),
    #[error("self-edge on node {0}")]
    SelfEdge(NodeId),
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("edge {}->{} ({}) is not in the graph", .0.from, .0.to, .0.kind)]
    MissingEdge(Edge),
    #[error("cannot import graph: {0}")]
    Import(String),
}
