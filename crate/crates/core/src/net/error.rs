use thiserror::Error;

use super::NodeId;
use crate::script::ScriptParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown property {name:?} on node {node}")]
    UnknownProperty { node: NodeId, name: String },
    #[error("duplicate property name {0:?}")]
    DuplicatePropertyName(String),
    #[error("invalid property name {0:?}")]
    InvalidPropertyName(String),
    #[error("bipartite violation: node {0} is an action, expected an object")]
    BipartiteViolation(NodeId),
    #[error("sensed properties must hold signal values")]
    SensedNotSignal,
    #[error("invalid sensor address: {0}")]
    InvalidAddress(String),
    #[error(transparent)]
    ScriptParse(#[from] ScriptParseError),
}
