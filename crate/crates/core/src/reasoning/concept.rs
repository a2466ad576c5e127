use std::collections::BTreeSet;

use super::fragment::{Fragment, Truth};
use super::matching::{compatible, consistent};
use super::pattern::{Pattern, PatternNode};
use super::ReasoningError;
use crate::net::{Net, NetError, NodeId, NodeKind, PropertyName, Provenance, Value};

/// A concept: a value-free pattern, optionally living in a net as a
/// connected group of nodes whose root object stands for the concept.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptTemplate {
    /// The root object once installed in a net.
    pub id: Option<NodeId>,
    pub pattern: Pattern,
    /// Occurrences found when mined; zero for concepts built by hand.
    pub support: usize,
    pub parent: Option<NodeId>,
}

impl ConceptTemplate {
    /// Reads the concept rooted at `concept` back out of a net: its connected
    /// group of nodes, and its parent through an is-a edge if it has one.
    pub fn from_net(net: &Net, concept: NodeId) -> Result<Self, ReasoningError> {
        if net.kind_of(concept) != Some(NodeKind::Object) {
            return Err(ReasoningError::UnknownConcept(concept));
        }
        let (pattern, _) =
            Pattern::component(net, concept).ok_or(ReasoningError::UnknownConcept(concept))?;
        Ok(ConceptTemplate {
            id: Some(concept),
            pattern,
            support: 0,
            parent: net.concepts_of(concept).first().copied(),
        })
    }

    /// Writes the pattern into `net` as a concept group and links it to its
    /// parent. Returns the root object.
    pub fn install(&mut self, net: &mut Net) -> Result<NodeId, ReasoningError> {
        if self.pattern.root.is_none() {
            self.pattern.root = self.pattern.hub();
        }
        let root_index = self.pattern.root.ok_or(ReasoningError::BipartiteViolation(0))?;
        let ids = self.pattern.install(net, Provenance::Asserted)?;
        let root = ids[root_index];
        if let Some(parent) = self.parent {
            net.add_isa(root, parent)?;
        }
        self.id = Some(root);
        Ok(root)
    }
}

/// What a specialisation adds to its parent: property names on existing
/// pattern nodes, and new nodes whose endpoint indices may refer to parent
/// nodes or to other new nodes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extension {
    pub properties: Vec<(usize, PropertyName)>,
    pub nodes: Vec<PatternNode>,
}

/// Builds and installs a narrower concept below `parent`.
pub fn specialize(
    net: &mut Net,
    parent: &ConceptTemplate,
    additions: &Extension,
) -> Result<ConceptTemplate, ReasoningError> {
    let mut pattern = parent.pattern.clone();
    for (i, name) in &additions.properties {
        pattern
            .nodes
            .get_mut(*i)
            .ok_or(ReasoningError::DetachedAddition(*i))?
            .names
            .insert(name.clone());
    }
    pattern.nodes.extend(additions.nodes.iter().cloned());
    pattern.validate()?;
    let mut child = ConceptTemplate {
        id: None,
        pattern,
        support: 0,
        parent: parent.id,
    };
    child.install(net)?;
    Ok(child)
}

/// Decision for one pattern node during shaping.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Open,
    New,
    Matched(NodeId),
}

struct Shaper<'a> {
    p: &'a Pattern,
    net: &'a Net,
    order: Vec<(usize, Option<usize>)>,
    root: usize,
    instance: NodeId,
    best: Option<(usize, Vec<Slot>)>,
}

impl Shaper<'_> {
    fn placed(slots: &[Slot]) -> Vec<Option<NodeId>> {
        slots
            .iter()
            .map(|s| match s {
                Slot::Matched(id) => Some(*id),
                _ => None,
            })
            .collect()
    }

    fn options(&self, slots: &[Slot], used: &BTreeSet<NodeId>, i: usize, parent: Option<usize>) -> Option<Vec<Slot>> {
        let node = &self.p.nodes[i];
        // A matched action pins its endpoints.
        let mut forced = None;
        for (j, other) in self.p.nodes.iter().enumerate() {
            let Slot::Matched(na) = slots[j] else { continue };
            if other.kind != NodeKind::Action {
                continue;
            }
            let a = self.net.action(na).expect("matched action");
            let pinned = if other.subject == Some(i) {
                a.subject()
            } else if other.target == Some(i) {
                Some(a.target())
            } else {
                continue;
            };
            match (forced, pinned) {
                (_, None) => return None,
                (None, Some(x)) => forced = Some(x),
                (Some(f), Some(x)) if f != x => return None,
                _ => {}
            }
        }
        let placed = Self::placed(slots);
        let valid = |id: NodeId| {
            !used.contains(&id) && compatible(self.p, i, self.net, id) && consistent(self.p, self.net, &placed, i, id)
        };
        if let Some(f) = forced {
            return valid(f).then(|| vec![Slot::Matched(f)]);
        }
        let endpoint_new = node.kind == NodeKind::Action
            && node
                .subject
                .into_iter()
                .chain(node.target)
                .any(|e| slots[e] == Slot::New);
        let parent_slot = parent.map(|q| slots[q]);
        let Some(Slot::Matched(pm)) = parent_slot else {
            return Some(vec![Slot::New]);
        };
        if endpoint_new {
            return Some(vec![Slot::New]);
        }
        let mut out: Vec<Slot> = self
            .net
            .neighbours(pm)
            .into_iter()
            .filter(|&id| valid(id))
            .map(Slot::Matched)
            .collect();
        out.sort_by_key(|s| match s {
            Slot::Matched(id) => *id,
            _ => NodeId::new(0),
        });
        out.push(Slot::New);
        Some(out)
    }

    fn search(&mut self, k: usize, matched: usize, slots: &mut Vec<Slot>, used: &mut BTreeSet<NodeId>) {
        if let Some((best, _)) = &self.best {
            if matched + (self.order.len() - k) <= *best {
                return;
            }
        }
        if k == self.order.len() {
            self.best = Some((matched, slots.clone()));
            return;
        }
        let (i, parent) = self.order[k];
        let options = if i == self.root {
            vec![Slot::Matched(self.instance)]
        } else {
            match self.options(slots, used, i, parent) {
                Some(o) => o,
                None => return,
            }
        };
        for opt in options {
            slots[i] = opt;
            let gain = if let Slot::Matched(id) = opt {
                used.insert(id);
                1
            } else {
                0
            };
            self.search(k + 1, matched + gain, slots, used);
            if let Slot::Matched(id) = opt {
                used.remove(&id);
            }
            slots[i] = Slot::Open;
        }
    }
}

/// Makes `instance` look like the concept rooted at `concept`: the part of
/// the concept's pattern already present around the instance is matched,
/// and the rest is created with `Unset` values and inferred provenance. The
/// instance also receives any property names of the concept root it lacks.
/// Returns the created nodes; a second call creates none.
pub fn shape(net: &mut Net, instance: NodeId, concept: NodeId) -> Result<Vec<NodeId>, ReasoningError> {
    let template = ConceptTemplate::from_net(net, concept)?;
    match net.kind_of(instance) {
        Some(NodeKind::Object) => {}
        Some(NodeKind::Action) => return Err(NetError::BipartiteViolation(instance).into()),
        None => return Err(NetError::UnknownNode(instance).into()),
    }
    let p = &template.pattern;
    let root = p.root.expect("component is rooted");
    let mut shaper = Shaper {
        p,
        net,
        order: p.bfs(root),
        root,
        instance,
        best: None,
    };
    let mut slots = vec![Slot::Open; p.len()];
    shaper.search(0, 0, &mut slots, &mut BTreeSet::new());
    let (_, slots) = shaper.best.expect("the root alone is a complete assignment");

    let mut ids: Vec<Option<NodeId>> = Shaper::placed(&slots);
    let mut created = Vec::new();
    let unset = |names: &BTreeSet<PropertyName>| {
        names
            .iter()
            .map(|n| (n.as_str().to_string(), Value::Unset))
            .collect::<Vec<_>>()
    };
    for (i, n) in p.nodes.iter().enumerate() {
        if n.kind == NodeKind::Object && ids[i].is_none() {
            let id = net.add_object(unset(&n.names))?;
            ids[i] = Some(id);
            created.push(id);
        }
    }
    for (i, n) in p.nodes.iter().enumerate() {
        if n.kind == NodeKind::Action && ids[i].is_none() {
            let subject = n.subject.and_then(|s| ids[s]);
            let target = ids[n.target.expect("validated")].expect("objects placed");
            let id = net.add_action(subject, target, None, unset(&n.names))?;
            ids[i] = Some(id);
            created.push(id);
        }
    }
    for &id in &created {
        net.mark_origin(id, Provenance::Inferred);
        let names: Vec<PropertyName> = net.properties(id)?.keys().cloned().collect();
        for name in names {
            net.set_property(id, name.as_str(), Value::Unset, Provenance::Inferred)?;
        }
    }
    for name in &p.nodes[root].names {
        if net.property(instance, name.as_str()).is_err() {
            net.set_property(instance, name.as_str(), Value::Unset, Provenance::Inferred)?;
        }
    }
    created.sort_unstable();
    Ok(created)
}

/// Answer to a structural question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    /// Holds on asserted or sensed structure alone.
    YesAsserted,
    /// Holds only once inferred structure is counted.
    YesInferred,
    Unknown,
}

/// Asks whether `fragment` holds of `instance`. If it does not hold on what
/// is known, the instance is shaped after each concept it is declared an
/// instance of, and the question is asked again.
pub fn query_has(net: &mut Net, instance: NodeId, fragment: &Fragment) -> Answer {
    if fragment.evaluate(net, instance, false) == Truth::True {
        return Answer::YesAsserted;
    }
    if fragment.evaluate(net, instance, true) == Truth::True {
        return Answer::YesInferred;
    }
    let mut shaped = false;
    for concept in net.concepts_of(instance) {
        shaped |= shape(net, instance, concept).is_ok();
    }
    if shaped && fragment.evaluate(net, instance, true) == Truth::True {
        return Answer::YesInferred;
    }
    Answer::Unknown
}
