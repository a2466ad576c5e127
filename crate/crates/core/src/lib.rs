//! A knowledge net of objects and actions.
//!
//! Objects carry properties; actions join a (possibly blank) subject object to
//! a target object and may carry a small script describing what they do.
//! Around that core sit an action-script interpreter, a lazily loaded file
//! store, structural reasoning (collapse and expand, concept mining and
//! shaping, pattern queries), a simulator with snapshots and change
//! detection, a natural-language lexicon, a minimal self model and a command
//! interpreter.

pub mod agent;
pub mod cli;
pub mod lexicon;
pub mod net;
pub mod reasoning;
pub mod script;
pub mod sim;
pub mod store;
mod text;

pub use net::{Net, NodeId, Value};
