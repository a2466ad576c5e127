//! The object–action net.
//!
//! A [`Net`] holds two kinds of node: objects, which carry properties and
//! lists of the actions they initiate or receive, and actions, which carry a
//! subject (possibly blank), a target, an optional script and their own
//! properties. Links only ever join an object to an action; every public
//! mutation keeps that bipartite shape and the symmetry between an action's
//! endpoints and the endpoint objects' action lists.

mod error;
mod record;
mod validate;
mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use error::NetError;
pub use record::{
    is_identifier, ActionRecord, LoadState, NodeKind, ObjectRecord, Properties, PropertyLoad,
    PropertyName, PropertyRecord, Provenance, ScriptRef, RESERVED_PREFIXES,
};
pub use validate::{Violation, ViolationKind, ViolationReport};
pub use value::{SensorAddress, SensorSignal, Value, ValueKind, MAX_ADDRESS_LEN};

use crate::script;
use crate::sim::Timeline;

/// Internal node identifier. Allocated from a per-net counter and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u64);

impl NodeId {
    pub const fn new(raw: u64) -> Self {
        NodeId(raw)
    }

    pub const fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One entry in the sense log kept while a self model is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseEntry {
    pub tick: u64,
    pub object: NodeId,
    pub name: PropertyName,
    pub signal: SensorSignal,
}

#[derive(Debug, Clone)]
pub struct Net {
    pub(crate) objects: BTreeMap<NodeId, ObjectRecord>,
    pub(crate) actions: BTreeMap<NodeId, ActionRecord>,
    pub(crate) next_id: u64,
    pub(crate) isa: BTreeSet<(NodeId, NodeId)>,
    clock: u64,
    pub(crate) timeline: Timeline,
    sense_log: Option<Vec<SenseEntry>>,
}

impl Default for Net {
    fn default() -> Self {
        Self::new()
    }
}

/// Structural equality: nodes, properties, links, scripts and is-a edges.
/// Clocks, timelines and sense logs are runtime state and are not compared.
impl PartialEq for Net {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects && self.actions == other.actions && self.isa == other.isa
    }
}

pub(crate) fn insert_sorted(list: &mut Vec<NodeId>, id: NodeId) {
    if let Err(pos) = list.binary_search(&id) {
        list.insert(pos, id);
    }
}

pub(crate) fn remove_sorted(list: &mut Vec<NodeId>, id: NodeId) {
    if let Ok(pos) = list.binary_search(&id) {
        list.remove(pos);
    }
}

fn collect_properties<I, S>(props: I) -> Result<Properties, NetError>
where
    I: IntoIterator<Item = (S, Value)>,
    S: AsRef<str>,
{
    let mut out = Properties::new();
    for (name, value) in props {
        let name = PropertyName::new(name.as_ref())?;
        if out.contains_key(&name) {
            return Err(NetError::DuplicatePropertyName(name.to_string()));
        }
        out.insert(name, PropertyRecord::hydrated(value, Provenance::Asserted));
    }
    Ok(out)
}

impl Net {
    pub fn new() -> Self {
        Net {
            objects: BTreeMap::new(),
            actions: BTreeMap::new(),
            next_id: 1,
            isa: BTreeSet::new(),
            clock: 0,
            timeline: Timeline::default(),
            sense_log: None,
        }
    }

    pub(crate) fn alloc_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    /// Ensures future allocations start above `id`.
    pub(crate) fn reserve_through(&mut self, id: NodeId) {
        if self.next_id <= id.0 {
            self.next_id = id.0 + 1;
        }
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    /// Advances the engine clock and returns the new tick.
    pub fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    pub fn now(&self) -> u64 {
        self.clock
    }

    pub(crate) fn advance_clock_to(&mut self, tick: u64) {
        self.clock = self.clock.max(tick);
    }

    /// Packages a raw input from `origin` with a fresh engine tick.
    pub fn capture(&mut self, origin: SensorAddress, payload: impl Into<Vec<u8>>) -> SensorSignal {
        let tick = self.tick();
        SensorSignal::new(origin, payload, tick)
    }

    pub fn add_object<I, S>(&mut self, properties: I) -> Result<NodeId, NetError>
    where
        I: IntoIterator<Item = (S, Value)>,
        S: AsRef<str>,
    {
        let properties = collect_properties(properties)?;
        let id = self.alloc_id();
        let mut rec = ObjectRecord::new(id);
        rec.properties = properties;
        self.objects.insert(id, rec);
        Ok(id)
    }

    /// Adds an action from `subject` (blank when unknown) onto `target`.
    ///
    /// An inline script is parsed eagerly.
    pub fn add_action<I, S>(
        &mut self,
        subject: Option<NodeId>,
        target: NodeId,
        script: Option<&str>,
        properties: I,
    ) -> Result<NodeId, NetError>
    where
        I: IntoIterator<Item = (S, Value)>,
        S: AsRef<str>,
    {
        if let Some(s) = subject {
            self.require_object(s)?;
        }
        self.require_object(target)?;
        let properties = collect_properties(properties)?;
        let script = match script {
            Some(src) => ScriptRef::Loaded {
                ast: script::parse(src)?,
                source: src.to_string(),
            },
            None => ScriptRef::None,
        };
        let id = self.alloc_id();
        let mut rec = ActionRecord::new(id, subject, target);
        rec.properties = properties;
        rec.script = script;
        self.link_action(rec);
        Ok(id)
    }

    fn require_object(&self, id: NodeId) -> Result<(), NetError> {
        if self.objects.contains_key(&id) {
            Ok(())
        } else if self.actions.contains_key(&id) {
            Err(NetError::BipartiteViolation(id))
        } else {
            Err(NetError::UnknownNode(id))
        }
    }

    /// Inserts an action record and repairs the endpoint lists. Endpoints
    /// must already be live objects.
    pub(crate) fn link_action(&mut self, rec: ActionRecord) {
        let id = rec.id;
        if let Some(s) = rec.subject {
            if let Some(o) = self.objects.get_mut(&s) {
                insert_sorted(&mut o.outgoing, id);
            }
        }
        if let Some(o) = self.objects.get_mut(&rec.target) {
            insert_sorted(&mut o.incoming, id);
        }
        self.actions.insert(id, rec);
    }

    /// Removes an action record and its entries in the endpoint lists.
    pub(crate) fn unlink_action(&mut self, id: NodeId) -> Option<ActionRecord> {
        let rec = self.actions.remove(&id)?;
        if let Some(s) = rec.subject {
            if let Some(o) = self.objects.get_mut(&s) {
                remove_sorted(&mut o.outgoing, id);
            }
        }
        if let Some(o) = self.objects.get_mut(&rec.target) {
            remove_sorted(&mut o.incoming, id);
        }
        Some(rec)
    }

    pub(crate) fn mark_origin(&mut self, id: NodeId, origin: Provenance) {
        if let Some(o) = self.objects.get_mut(&id) {
            o.origin = origin;
        } else if let Some(a) = self.actions.get_mut(&id) {
            a.origin = origin;
        }
    }

    /// How a node came to exist: asserted, or inferred by shaping.
    pub fn origin_of(&self, id: NodeId) -> Option<Provenance> {
        self.objects
            .get(&id)
            .map(|o| o.origin)
            .or_else(|| self.actions.get(&id).map(|a| a.origin))
    }

    pub(crate) fn properties_mut(&mut self, node: NodeId) -> Result<&mut Properties, NetError> {
        if let Some(o) = self.objects.get_mut(&node) {
            Ok(&mut o.properties)
        } else if let Some(a) = self.actions.get_mut(&node) {
            Ok(&mut a.properties)
        } else {
            Err(NetError::UnknownNode(node))
        }
    }

    pub fn properties(&self, node: NodeId) -> Result<&Properties, NetError> {
        if let Some(o) = self.objects.get(&node) {
            Ok(&o.properties)
        } else if let Some(a) = self.actions.get(&node) {
            Ok(&a.properties)
        } else {
            Err(NetError::UnknownNode(node))
        }
    }

    pub fn property(&self, node: NodeId, name: &str) -> Result<&PropertyRecord, NetError> {
        self.properties(node)?
            .get(name)
            .ok_or_else(|| NetError::UnknownProperty {
                node,
                name: name.to_string(),
            })
    }

    /// The hydrated value of a property; stubs report `None`.
    pub fn value(&self, node: NodeId, name: &str) -> Result<Option<&Value>, NetError> {
        Ok(self.property(node, name)?.value())
    }

    /// Creates or overwrites a property on an object or action.
    pub fn set_property(
        &mut self,
        node: NodeId,
        name: &str,
        value: Value,
        provenance: Provenance,
    ) -> Result<(), NetError> {
        if provenance == Provenance::Sensed && !matches!(value, Value::Signal(_)) {
            return Err(NetError::SensedNotSignal);
        }
        let name = PropertyName::new(name)?;
        let props = self.properties_mut(node)?;
        props.insert(name, PropertyRecord::hydrated(value, provenance));
        Ok(())
    }

    pub fn erase_property(&mut self, node: NodeId, name: &str) -> Result<(), NetError> {
        let props = self.properties_mut(node)?;
        props
            .remove(name)
            .map(|_| ())
            .ok_or_else(|| NetError::UnknownProperty {
                node,
                name: name.to_string(),
            })
    }

    /// Removes a node. Erasing an object also erases every action that
    /// touches it; erasing an action only shortens its endpoints' lists.
    pub fn erase_node(&mut self, node: NodeId) -> Result<(), NetError> {
        if self.actions.contains_key(&node) {
            self.unlink_action(node);
            return Ok(());
        }
        let obj = self
            .objects
            .get(&node)
            .ok_or(NetError::UnknownNode(node))?;
        let incident: BTreeSet<NodeId> = obj
            .outgoing
            .iter()
            .chain(obj.incoming.iter())
            .copied()
            .collect();
        for a in incident {
            self.unlink_action(a);
        }
        self.objects.remove(&node);
        self.isa.retain(|&(i, c)| i != node && c != node);
        Ok(())
    }

    /// Stores a sensed signal on an object property. When a sense log is
    /// attached, the event is appended to it.
    pub fn ingest_signal(
        &mut self,
        object: NodeId,
        name: &str,
        signal: SensorSignal,
    ) -> Result<(), NetError> {
        self.require_object(object)?;
        let name = PropertyName::new(name)?;
        let rec = self.objects.get_mut(&object).expect("checked above");
        rec.properties.insert(
            name.clone(),
            PropertyRecord::hydrated(Value::Signal(signal.clone()), Provenance::Sensed),
        );
        self.advance_clock_to(signal.captured_at);
        if self.sense_log.is_some() {
            let tick = self.tick();
            if let Some(log) = self.sense_log.as_mut() {
                log.push(SenseEntry {
                    tick,
                    object,
                    name,
                    signal,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn attach_sense_log(&mut self) {
        if self.sense_log.is_none() {
            self.sense_log = Some(Vec::new());
        }
    }

    pub fn sense_log(&self) -> &[SenseEntry] {
        self.sense_log.as_deref().unwrap_or(&[])
    }

    pub fn has_sense_log(&self) -> bool {
        self.sense_log.is_some()
    }

    /// Records that `instance` is an instance of the concept object `concept`.
    pub fn add_isa(&mut self, instance: NodeId, concept: NodeId) -> Result<(), NetError> {
        self.require_object(instance)?;
        self.require_object(concept)?;
        self.isa.insert((instance, concept));
        Ok(())
    }

    pub fn remove_isa(&mut self, instance: NodeId, concept: NodeId) -> bool {
        self.isa.remove(&(instance, concept))
    }

    pub fn isa_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.isa.iter().copied()
    }

    /// Concepts `instance` is directly declared an instance of.
    pub fn concepts_of(&self, instance: NodeId) -> Vec<NodeId> {
        self.isa
            .range((instance, NodeId(0))..=(instance, NodeId(u64::MAX)))
            .map(|&(_, c)| c)
            .collect()
    }

    pub fn object(&self, id: NodeId) -> Option<&ObjectRecord> {
        self.objects.get(&id)
    }

    pub fn action(&self, id: NodeId) -> Option<&ActionRecord> {
        self.actions.get(&id)
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectRecord> + '_ {
        self.objects.values()
    }

    pub fn actions(&self) -> impl Iterator<Item = &ActionRecord> + '_ {
        self.actions.values()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn node_count(&self) -> usize {
        self.objects.len() + self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.kind_of(id).is_some()
    }

    pub fn kind_of(&self, id: NodeId) -> Option<NodeKind> {
        if self.objects.contains_key(&id) {
            Some(NodeKind::Object)
        } else if self.actions.contains_key(&id) {
            Some(NodeKind::Action)
        } else {
            None
        }
    }

    /// All live ids in ascending order.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self
            .objects
            .keys()
            .chain(self.actions.keys())
            .copied()
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Structural neighbours of a node: the endpoints of an action, or the
    /// actions touching an object.
    pub fn neighbours(&self, id: NodeId) -> Vec<NodeId> {
        if let Some(o) = self.objects.get(&id) {
            let mut n: Vec<NodeId> = o.outgoing.iter().chain(&o.incoming).copied().collect();
            n.sort_unstable();
            n.dedup();
            n
        } else if let Some(a) = self.actions.get(&id) {
            let mut n: Vec<NodeId> = a.subject.into_iter().chain([a.target]).collect();
            n.dedup();
            n
        } else {
            Vec::new()
        }
    }

    pub fn timeline(&self) -> &Timeline {
        &self.timeline
    }

    pub fn validate_bipartite(&self) -> ViolationReport {
        validate::validate(self)
    }
}
