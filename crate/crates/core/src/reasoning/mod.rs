//! Structural reasoning over the net: collapsing regions into complex nodes
//! and expanding them back, mining repeated patterns as concepts, shaping
//! instances after their concepts, and structural queries.
//!
//! Patterns compare node kinds, property names and link shape. Property
//! values never take part: two legs of different lengths are the same leg.

mod canon;
mod collapse;
mod concept;
mod fragment;
mod matching;
mod mine;
mod pattern;

use thiserror::Error;

use crate::net::{NetError, NodeId};

pub use canon::canonical_form;
pub use collapse::{
    boundary, collapse_to_action, collapse_to_object, expand, Boundary, CollapsePayload, Crossing,
    Cut, End, EndpointChoice, Expansion, Via,
};
pub use concept::{query_has, shape, specialize, Answer, ConceptTemplate, Extension};
pub use fragment::{Clause, Comparator, Direction, Fragment, FragmentError, Step, Test, Truth};
pub use matching::{find_matches, Match};
pub use mine::{mine_concepts, occurrences, MineConfig, DEFAULT_MAX_PATTERN_NODES};
pub use pattern::{Pattern, PatternNode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReasoningError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("the region to collapse is empty")]
    EmptyBoundary,
    #[error("the region to collapse is not connected")]
    Disconnected,
    #[error("boundary violation: {inside} links to {outside} across the cut")]
    BoundaryViolation { inside: NodeId, outside: NodeId },
    #[error("cannot choose the complex action's {} among {candidates:?}", end.keyword())]
    AmbiguousEndpoints { end: End, candidates: Vec<NodeId> },
    #[error("node {0} is not a collapsed node")]
    NotCollapsed(NodeId),
    #[error("action {action} touches complex node {node} but was not recorded at collapse")]
    UnrecordedLink { node: NodeId, action: NodeId },
    #[error("the {} of action {action} no longer matches the collapse record", end.keyword())]
    StaleEndpoint { action: NodeId, end: End },
    #[error("node {0} is not a concept object")]
    UnknownConcept(NodeId),
    #[error("pattern node {0} breaks the object/action alternation")]
    BipartiteViolation(usize),
    #[error("pattern node {0} is not connected to the rest of the pattern")]
    DetachedAddition(usize),
    #[error("invalid mining configuration: {0}")]
    InvalidConfig(String),
}
