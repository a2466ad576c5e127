use std::collections::BTreeMap;
use std::fmt;

use super::error::NetError;
use super::value::Value;
use super::NodeId;
use crate::reasoning::CollapsePayload;
use crate::script::Ast;

/// Reserved property-name prefixes used to persist goals on the self object.
pub const RESERVED_PREFIXES: [&str; 2] = ["goal:", "antigoal:"];

/// A property key: `[a-z][a-z0-9_-]*`, case-sensitive.
///
/// The agent's goal slots (`goal:<n>`, `antigoal:<n>`) are the only names
/// allowed outside that alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyName(String);

impl PropertyName {
    pub fn new(name: impl Into<String>) -> Result<Self, NetError> {
        let name = name.into();
        let ok = match RESERVED_PREFIXES.iter().find_map(|p| name.strip_prefix(p)) {
            Some(slot) => is_identifier(slot) || (!slot.is_empty() && slot.bytes().all(|b| b.is_ascii_digit())),
            None => is_identifier(&name),
        };
        if ok {
            Ok(PropertyName(name))
        } else {
            Err(NetError::InvalidPropertyName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        RESERVED_PREFIXES.iter().any(|p| self.0.starts_with(p))
    }
}

/// `[a-z][a-z0-9_-]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

impl fmt::Display for PropertyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for PropertyName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Asserted,
    Inferred,
    Sensed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyLoad {
    Hydrated,
    Stub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadState {
    Stub,
    Partial,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Object,
    Action,
}

/// A property slot. A stub knows its name and provenance but not its value.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRecord {
    pub(crate) value: Option<Value>,
    pub(crate) provenance: Provenance,
}

impl PropertyRecord {
    pub fn hydrated(value: Value, provenance: Provenance) -> Self {
        PropertyRecord {
            value: Some(value),
            provenance,
        }
    }

    pub(crate) fn stub(provenance: Provenance) -> Self {
        PropertyRecord {
            value: None,
            provenance,
        }
    }

    /// `None` while the value is still a stub.
    pub fn value(&self) -> Option<&Value> {
        self.value.as_ref()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn load_state(&self) -> PropertyLoad {
        if self.value.is_some() {
            PropertyLoad::Hydrated
        } else {
            PropertyLoad::Stub
        }
    }
}

pub type Properties = BTreeMap<PropertyName, PropertyRecord>;

fn load_state_of(props: &Properties, script_stub: bool) -> LoadState {
    let stubs = props.values().filter(|p| p.value.is_none()).count() + script_stub as usize;
    let total = props.len() + script_stub as usize;
    if stubs == 0 {
        LoadState::Full
    } else if stubs == total {
        LoadState::Stub
    } else {
        LoadState::Partial
    }
}

/// The executable part of an action.
#[derive(Debug, Clone, PartialEq)]
pub enum ScriptRef {
    None,
    /// Not yet read; `offset` is the byte offset of the `SCRIPT` record.
    Stub { offset: u64 },
    Loaded { source: String, ast: Ast },
}

impl ScriptRef {
    pub fn source(&self) -> Option<&str> {
        match self {
            ScriptRef::Loaded { source, .. } => Some(source),
            _ => None,
        }
    }

    pub fn is_stub(&self) -> bool {
        matches!(self, ScriptRef::Stub { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub(crate) id: NodeId,
    pub(crate) properties: Properties,
    pub(crate) outgoing: Vec<NodeId>,
    pub(crate) incoming: Vec<NodeId>,
    pub(crate) origin: Provenance,
    pub(crate) collapse: Option<Box<CollapsePayload>>,
}

impl ObjectRecord {
    pub(crate) fn new(id: NodeId) -> Self {
        ObjectRecord {
            id,
            properties: Properties::new(),
            outgoing: Vec::new(),
            incoming: Vec::new(),
            origin: Provenance::Asserted,
            collapse: None,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn properties(&self) -> &Properties {
        &self.properties
    }

    pub fn property(&self, name: &str) -> Option<&PropertyRecord> {
        self.properties.get(name)
    }

    /// Actions this object is the subject of, in id order.
    pub fn outgoing(&self) -> &[NodeId] {
        &self.outgoing
    }

    /// Actions targeting this object, in id order.
    pub fn incoming(&self) -> &[NodeId] {
        &self.incoming
    }

    /// `Inferred` for nodes created by shaping.
    pub fn origin(&self) -> Provenance {
        self.origin
    }

    pub fn load_state(&self) -> LoadState {
        load_state_of(&self.properties, false)
    }

    pub fn collapse_payload(&self) -> Option<&CollapsePayload> {
        self.collapse.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionRecord {
    pub(crate) id: NodeId,
    pub(crate) subject: Option<NodeId>,
    pub(crate) target: NodeId,
    pub(crate) script: ScriptRef,
    pub(crate) properties: Properties,
    pub(crate) origin: Provenance,
    pub(crate) collapse: Option<Box<CollapsePayload>>,
}

impl ActionRecord {
    pub(crate) fn new(id: NodeId, subject: Option<NodeId>, target: NodeId) -> Self {
        ActionRecord {
            id,
            subject,
            target,
            script: ScriptRef::None,
            properties: Properties::new(),
            origin: Provenance::Asserted,
            collapse: None,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    /// The initiator; `None` when unknown.
    pub fn subject(&self) -> Option<NodeId> {
        self.subject
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn script(&self) -> &ScriptRef {
        &self.script
    }

    pub fn properties(&self) -> &Properties {
        &self.properties
    }

    pub fn property(&self, name: &str) -> Option<&PropertyRecord> {
        self.properties.get(name)
    }

    pub fn origin(&self) -> Provenance {
        self.origin
    }

    pub fn load_state(&self) -> LoadState {
        load_state_of(&self.properties, self.script.is_stub())
    }

    pub fn collapse_payload(&self) -> Option<&CollapsePayload> {
        self.collapse.as_deref()
    }
}
