use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ReasoningError;
use crate::net::{insert_sorted, ActionRecord, Net, NodeId, NodeKind, ObjectRecord, Properties, Value};

/// Which end of an action a link attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Subject,
    Target,
}

impl End {
    pub fn keyword(self) -> &'static str {
        match self {
            End::Subject => "subject",
            End::Target => "target",
        }
    }
}

/// How a cut link leaves the inside set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    /// An inside object touched by an outside action.
    Action,
    /// An inside action touching an outside object.
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub inside: NodeId,
    pub outside: NodeId,
    pub via: Via,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub inside: BTreeSet<NodeId>,
    pub cut: Vec<Cut>,
}

/// One link between the collapsed region and the rest of the net, recorded
/// so expansion can put it back.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Crossing {
    pub action: NodeId,
    pub end: End,
    pub object: NodeId,
}

/// The subnet hidden behind a complex node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CollapsePayload {
    pub(crate) objects: Vec<ObjectRecord>,
    pub(crate) actions: Vec<ActionRecord>,
    pub(crate) isa: Vec<(NodeId, NodeId)>,
    pub(crate) crossings: Vec<Crossing>,
}

impl CollapsePayload {
    pub fn objects(&self) -> &[ObjectRecord] {
        &self.objects
    }

    pub fn actions(&self) -> &[ActionRecord] {
        &self.actions
    }

    pub fn isa_edges(&self) -> &[(NodeId, NodeId)] {
        &self.isa
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn node_count(&self) -> usize {
        self.objects.len() + self.actions.len()
    }

    /// Largest id mentioned anywhere in the payload, nested payloads included.
    pub fn max_id(&self) -> Option<NodeId> {
        let own = self
            .objects
            .iter()
            .map(|o| o.id)
            .chain(self.actions.iter().map(|a| a.id));
        let nested = self
            .objects
            .iter()
            .filter_map(|o| o.collapse.as_ref())
            .chain(self.actions.iter().filter_map(|a| a.collapse.as_ref()))
            .filter_map(|p| p.max_id());
        own.chain(nested).max()
    }

    /// The innermost payload, this one or a nested one, holding object `id`.
    fn holder_mut(&mut self, id: NodeId) -> Option<&mut CollapsePayload> {
        if self.objects.iter().any(|o| o.id == id) {
            return Some(self);
        }
        for o in &mut self.objects {
            if let Some(h) = o.collapse.as_mut().and_then(|p| p.holder_mut(id)) {
                return Some(h);
            }
        }
        for a in &mut self.actions {
            if let Some(h) = a.collapse.as_mut().and_then(|p| p.holder_mut(id)) {
                return Some(h);
            }
        }
        None
    }

    fn remap(&mut self, map: &BTreeMap<NodeId, NodeId>) {
        let m = |id: &mut NodeId| {
            if let Some(&n) = map.get(id) {
                *id = n;
            }
        };
        for c in &mut self.crossings {
            m(&mut c.action);
            m(&mut c.object);
        }
        for (i, c) in &mut self.isa {
            m(i);
            m(c);
        }
        for a in &mut self.actions {
            if let Some(s) = a.subject.as_mut() {
                m(s);
            }
            m(&mut a.target);
            remap_refs(&mut a.properties, map);
            if let Some(p) = a.collapse.as_mut() {
                p.remap(map);
            }
        }
        for o in &mut self.objects {
            remap_refs(&mut o.properties, map);
            if let Some(p) = o.collapse.as_mut() {
                p.remap(map);
            }
        }
    }
}

fn remap_refs(props: &mut Properties, map: &BTreeMap<NodeId, NodeId>) {
    for rec in props.values_mut() {
        if let Some(Value::Ref(id)) = rec.value.as_mut() {
            if let Some(&n) = map.get(id) {
                *id = n;
            }
        }
    }
}

/// Points every reference to a renamed node at its new id: references held
/// by live nodes and by the payloads of other collapsed nodes, which may
/// still name the old ids as outside endpoints or is-a partners.
fn remap_everywhere(net: &mut Net, map: &BTreeMap<NodeId, NodeId>) {
    let m = |id: NodeId| map.get(&id).copied().unwrap_or(id);
    net.isa = net.isa.iter().map(|&(i, c)| (m(i), m(c))).collect();
    for o in net.objects.values_mut() {
        remap_refs(&mut o.properties, map);
        if let Some(p) = o.collapse.as_mut() {
            p.remap(map);
        }
    }
    for a in net.actions.values_mut() {
        remap_refs(&mut a.properties, map);
        if let Some(p) = a.collapse.as_mut() {
            p.remap(map);
        }
    }
}

fn holder_of(net: &mut Net, id: NodeId) -> Option<&mut CollapsePayload> {
    for o in net.objects.values_mut() {
        if let Some(h) = o.collapse.as_mut().and_then(|p| p.holder_mut(id)) {
            return Some(h);
        }
    }
    for a in net.actions.values_mut() {
        if let Some(h) = a.collapse.as_mut().and_then(|p| p.holder_mut(id)) {
            return Some(h);
        }
    }
    None
}

/// Caller-supplied endpoints for a complex action when the region has more
/// than one candidate on a side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EndpointChoice {
    pub subject: Option<NodeId>,
    pub target: Option<NodeId>,
}

/// Result of [`expand`]: the re-inserted nodes and the id each payload node
/// received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub nodes: BTreeSet<NodeId>,
    pub renamed: BTreeMap<NodeId, NodeId>,
}

/// Computes the cut of `inside` after checking it is non-empty, live and
/// connected.
pub fn boundary(net: &Net, inside: &BTreeSet<NodeId>) -> Result<Boundary, ReasoningError> {
    let Some(&start) = inside.iter().next() else {
        return Err(ReasoningError::EmptyBoundary);
    };
    if let Some(&missing) = inside.iter().find(|&&id| !net.contains(id)) {
        return Err(crate::net::NetError::UnknownNode(missing).into());
    }
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for m in net.neighbours(n) {
            if inside.contains(&m) && seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    if seen.len() != inside.len() {
        return Err(ReasoningError::Disconnected);
    }
    let mut cut = Vec::new();
    for &id in inside {
        let via = match net.kind_of(id) {
            Some(NodeKind::Object) => Via::Action,
            _ => Via::Object,
        };
        for m in net.neighbours(id) {
            if !inside.contains(&m) {
                cut.push(Cut {
                    inside: id,
                    outside: m,
                    via,
                });
            }
        }
    }
    Ok(Boundary {
        inside: inside.clone(),
        cut,
    })
}

fn violation(c: &Cut) -> ReasoningError {
    ReasoningError::BoundaryViolation {
        inside: c.inside,
        outside: c.outside,
    }
}

/// Removes the inside nodes and their is-a edges from the net, returning
/// them as payload records with cleared action lists.
fn extract(net: &mut Net, inside: &BTreeSet<NodeId>, crossings: Vec<Crossing>) -> CollapsePayload {
    let mut payload = CollapsePayload {
        crossings,
        ..Default::default()
    };
    for &id in inside {
        if let Some(a) = net.actions.remove(&id) {
            payload.actions.push(a);
        }
    }
    for &id in inside {
        if let Some(mut o) = net.objects.remove(&id) {
            o.outgoing.clear();
            o.incoming.clear();
            payload.objects.push(o);
        }
    }
    let moved: Vec<(NodeId, NodeId)> = net
        .isa
        .iter()
        .filter(|(i, c)| inside.contains(i) || inside.contains(c))
        .copied()
        .collect();
    for e in &moved {
        net.isa.remove(e);
    }
    payload.isa = moved;
    payload
}

/// Replaces a region joined to the rest of the net only through actions by
/// one complex object. The crossing actions keep their ids and are rewired
/// onto the new object.
pub fn collapse_to_object(net: &mut Net, inside: &BTreeSet<NodeId>) -> Result<NodeId, ReasoningError> {
    let b = boundary(net, inside)?;
    if let Some(c) = b.cut.iter().find(|c| c.via == Via::Object) {
        return Err(violation(c));
    }
    let outside_actions: BTreeSet<NodeId> = b.cut.iter().map(|c| c.outside).collect();
    let mut crossings = Vec::new();
    for &a in &outside_actions {
        let rec = &net.actions[&a];
        if let Some(s) = rec.subject.filter(|s| inside.contains(s)) {
            crossings.push(Crossing {
                action: a,
                end: End::Subject,
                object: s,
            });
        }
        if inside.contains(&rec.target) {
            crossings.push(Crossing {
                action: a,
                end: End::Target,
                object: rec.target,
            });
        }
    }
    let id = net.alloc_id();
    let mut complex = ObjectRecord::new(id);
    for c in &crossings {
        let rec = net.actions.get_mut(&c.action).expect("crossing action is live");
        match c.end {
            End::Subject => {
                rec.subject = Some(id);
                insert_sorted(&mut complex.outgoing, c.action);
            }
            End::Target => {
                rec.target = id;
                insert_sorted(&mut complex.incoming, c.action);
            }
        }
    }
    let payload = extract(net, inside, crossings);
    complex.collapse = Some(Box::new(payload));
    net.objects.insert(id, complex);
    Ok(id)
}

fn pick(
    candidates: BTreeSet<NodeId>,
    choice: Option<NodeId>,
    end: End,
) -> Result<Option<NodeId>, ReasoningError> {
    match choice {
        Some(c) if candidates.contains(&c) => Ok(Some(c)),
        Some(_) => Err(ReasoningError::AmbiguousEndpoints {
            end,
            candidates: candidates.into_iter().collect(),
        }),
        None if candidates.len() <= 1 => Ok(candidates.into_iter().next()),
        None => Err(ReasoningError::AmbiguousEndpoints {
            end,
            candidates: candidates.into_iter().collect(),
        }),
    }
}

/// Replaces a region joined to the rest of the net only through objects by
/// one complex action from the outside initiator to the outside recipient.
/// A single action is already minimal and is returned unchanged.
pub fn collapse_to_action(
    net: &mut Net,
    inside: &BTreeSet<NodeId>,
    choice: EndpointChoice,
) -> Result<NodeId, ReasoningError> {
    if inside.len() == 1 {
        let only = *inside.iter().next().expect("len is 1");
        if net.action(only).is_some() {
            return Ok(only);
        }
    }
    let b = boundary(net, inside)?;
    if let Some(c) = b.cut.iter().find(|c| c.via == Via::Action) {
        return Err(violation(c));
    }
    let mut crossings = Vec::new();
    for &id in inside {
        if let Some(a) = net.action(id) {
            if let Some(s) = a.subject.filter(|s| !inside.contains(s)) {
                crossings.push(Crossing {
                    action: id,
                    end: End::Subject,
                    object: s,
                });
            }
            if !inside.contains(&a.target) {
                crossings.push(Crossing {
                    action: id,
                    end: End::Target,
                    object: a.target,
                });
            }
        }
    }
    let side = |end| {
        crossings
            .iter()
            .filter(|c| c.end == end)
            .map(|c| c.object)
            .collect::<BTreeSet<_>>()
    };
    let subject = pick(side(End::Subject), choice.subject, End::Subject)?;
    let recipients = side(End::Target);
    if recipients.is_empty() {
        return Err(ReasoningError::AmbiguousEndpoints {
            end: End::Target,
            candidates: Vec::new(),
        });
    }
    let target = pick(recipients, choice.target, End::Target)?.expect("non-empty");
    // Detach from the outside endpoints first; extract then lifts the records.
    for &id in inside {
        if let Some(rec) = net.unlink_action(id) {
            net.actions.insert(id, rec);
        }
    }
    let payload = extract(net, inside, crossings);
    let id = net.alloc_id();
    let mut complex = ActionRecord::new(id, subject, target);
    complex.collapse = Some(Box::new(payload));
    net.link_action(complex);
    Ok(id)
}

/// Re-inserts the subnet behind a complex node under fresh ids and removes
/// the complex node.
pub fn expand(net: &mut Net, complex: NodeId) -> Result<Expansion, ReasoningError> {
    let (payload, is_object) = if let Some(o) = net.object(complex) {
        (o.collapse.as_deref(), true)
    } else if let Some(a) = net.action(complex) {
        (a.collapse.as_deref(), false)
    } else {
        return Err(crate::net::NetError::UnknownNode(complex).into());
    };
    let payload = payload.ok_or(ReasoningError::NotCollapsed(complex))?.clone();
    let inner: BTreeSet<NodeId> = payload
        .objects
        .iter()
        .map(|o| o.id)
        .chain(payload.actions.iter().map(|a| a.id))
        .collect();

    if is_object {
        let rec = &net.objects[&complex];
        let recorded: BTreeSet<(NodeId, End)> =
            payload.crossings.iter().map(|c| (c.action, c.end)).collect();
        let live = rec
            .outgoing
            .iter()
            .map(|&a| (a, End::Subject))
            .chain(rec.incoming.iter().map(|&a| (a, End::Target)));
        for (a, end) in live {
            if !recorded.contains(&(a, end)) {
                return Err(ReasoningError::UnrecordedLink {
                    node: complex,
                    action: a,
                });
            }
        }
        for c in &payload.crossings {
            let ok = net.action(c.action).is_some_and(|a| match c.end {
                End::Subject => a.subject == Some(complex),
                End::Target => a.target == complex,
            });
            if !ok {
                return Err(ReasoningError::StaleEndpoint {
                    action: c.action,
                    end: c.end,
                });
            }
        }
    } else {
        for a in &payload.actions {
            let ends = a.subject.map(|s| (s, End::Subject)).into_iter().chain([(a.target, End::Target)]);
            for (o, end) in ends {
                if !inner.contains(&o) && net.object(o).is_none() {
                    return Err(ReasoningError::StaleEndpoint { action: a.id, end });
                }
            }
        }
    }

    let mut renamed = BTreeMap::new();
    for &old in &inner {
        renamed.insert(old, net.alloc_id());
    }
    let map = |id: NodeId| renamed.get(&id).copied().unwrap_or(id);

    for o in &payload.objects {
        let mut rec = o.clone();
        rec.id = map(o.id);
        if let Some(p) = rec.collapse.as_mut() {
            p.remap(&renamed);
        }
        net.objects.insert(rec.id, rec);
    }
    if is_object {
        for c in &payload.crossings {
            let new_end = map(c.object);
            let rec = net.actions.get_mut(&c.action).expect("validated");
            match c.end {
                End::Subject => rec.subject = Some(new_end),
                End::Target => rec.target = new_end,
            }
            let obj = net.objects.get_mut(&new_end).expect("inserted above");
            match c.end {
                End::Subject => insert_sorted(&mut obj.outgoing, c.action),
                End::Target => insert_sorted(&mut obj.incoming, c.action),
            }
        }
        net.objects.remove(&complex);
        net.isa.retain(|&(i, c)| i != complex && c != complex);
    } else {
        net.unlink_action(complex);
    }
    for a in &payload.actions {
        let mut rec = a.clone();
        rec.id = map(a.id);
        rec.subject = a.subject.map(map);
        rec.target = map(a.target);
        if let Some(p) = rec.collapse.as_mut() {
            p.remap(&renamed);
        }
        net.link_action(rec);
    }
    remap_everywhere(net, &renamed);
    for &(i, c) in &payload.isa {
        let edge = (map(i), map(c));
        // The far end may itself be collapsed elsewhere by now.
        let hidden = [edge.0, edge.1].into_iter().find(|&n| !net.objects.contains_key(&n));
        match hidden.and_then(|n| holder_of(net, n)) {
            Some(p) => p.isa.push(edge),
            None => {
                net.isa.insert(edge);
            }
        }
    }
    Ok(Expansion {
        nodes: renamed.values().copied().collect(),
        renamed,
    })
}
