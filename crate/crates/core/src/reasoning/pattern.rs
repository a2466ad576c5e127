use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::ReasoningError;
use crate::net::{Net, NodeId, NodeKind, PropertyName, Provenance, Value};

/// A value-free node: kind and property names only. Actions refer to their
/// endpoints by index into the owning pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternNode {
    pub kind: NodeKind,
    pub names: BTreeSet<PropertyName>,
    pub subject: Option<usize>,
    pub target: Option<usize>,
}

impl PatternNode {
    pub fn object<I: IntoIterator<Item = PropertyName>>(names: I) -> Self {
        PatternNode {
            kind: NodeKind::Object,
            names: names.into_iter().collect(),
            subject: None,
            target: None,
        }
    }

    pub fn action<I: IntoIterator<Item = PropertyName>>(
        subject: Option<usize>,
        target: usize,
        names: I,
    ) -> Self {
        PatternNode {
            kind: NodeKind::Action,
            names: names.into_iter().collect(),
            subject,
            target: Some(target),
        }
    }
}

/// A small value-free net: the shape of a concept.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pattern {
    pub nodes: Vec<PatternNode>,
    /// The node that stands for the concept itself, when there is one.
    pub root: Option<usize>,
}

pub(crate) fn names_of(net: &Net, id: NodeId) -> BTreeSet<PropertyName> {
    net.properties(id)
        .map(|p| p.keys().filter(|n| !n.is_reserved()).cloned().collect())
        .unwrap_or_default()
}

impl Pattern {
    /// The pattern spanned by `ids`, which must include every endpoint of
    /// every action among them. Returns the pattern and the node behind each
    /// pattern index.
    pub fn from_subnet(net: &Net, ids: &BTreeSet<NodeId>) -> Option<(Pattern, Vec<NodeId>)> {
        let order: Vec<NodeId> = ids.iter().copied().collect();
        let index: BTreeMap<NodeId, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut nodes = Vec::with_capacity(order.len());
        for &id in &order {
            let names = names_of(net, id);
            let node = match net.kind_of(id)? {
                NodeKind::Object => PatternNode::object(names),
                NodeKind::Action => {
                    let a = net.action(id)?;
                    let subject = match a.subject() {
                        Some(s) => Some(*index.get(&s)?),
                        None => None,
                    };
                    PatternNode::action(subject, *index.get(&a.target())?, names)
                }
            };
            nodes.push(node);
        }
        Some((Pattern { nodes, root: None }, order))
    }

    /// The connected component of `root` in `net`, rooted there.
    pub fn component(net: &Net, root: NodeId) -> Option<(Pattern, Vec<NodeId>)> {
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for m in net.neighbours(n) {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        let (mut p, ids) = Pattern::from_subnet(net, &seen)?;
        p.root = ids.iter().position(|&i| i == root);
        Some((p, ids))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn object_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Object).count()
    }

    pub fn action_count(&self) -> usize {
        self.len() - self.object_count()
    }

    /// Indices linked to `i`.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let node = &self.nodes[i];
        let mut out: Vec<usize> = match node.kind {
            NodeKind::Action => node.subject.into_iter().chain(node.target).collect(),
            NodeKind::Object => self
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, a)| a.kind == NodeKind::Action && (a.subject == Some(i) || a.target == Some(i)))
                .map(|(j, _)| j)
                .collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks alternation, endpoint presence and connectivity.
    pub fn validate(&self) -> Result<(), ReasoningError> {
        for (i, n) in self.nodes.iter().enumerate() {
            match n.kind {
                NodeKind::Object => {
                    if n.subject.is_some() || n.target.is_some() {
                        return Err(ReasoningError::BipartiteViolation(i));
                    }
                }
                NodeKind::Action => {
                    let ends = n.subject.into_iter().chain(n.target);
                    for e in ends {
                        if self.nodes.get(e).map(|x| x.kind) != Some(NodeKind::Object) {
                            return Err(ReasoningError::BipartiteViolation(i));
                        }
                    }
                    if n.target.is_none() {
                        return Err(ReasoningError::BipartiteViolation(i));
                    }
                }
            }
        }
        if let Some(i) = self.unreachable().first() {
            return Err(ReasoningError::DetachedAddition(*i));
        }
        Ok(())
    }

    fn unreachable(&self) -> Vec<usize> {
        if self.nodes.is_empty() {
            return Vec::new();
        }
        let start = self.root.unwrap_or(0);
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in self.neighbours(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..self.len()).filter(|&i| !seen[i]).collect()
    }

    /// Breadth-first order from `start` with each node's tree parent.
    pub(crate) fn bfs(&self, start: usize) -> Vec<(usize, Option<usize>)> {
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut out = vec![(start, None)];
        let mut k = 0;
        while k < out.len() {
            let i = out[k].0;
            for j in self.neighbours(i) {
                if !seen[j] {
                    seen[j] = true;
                    out.push((j, Some(i)));
                }
            }
            k += 1;
        }
        out
    }

    /// The highest-degree object, lowest index first: a natural anchor for a
    /// mined pattern.
    pub fn hub(&self) -> Option<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i].kind == NodeKind::Object)
            .max_by_key(|&i| (self.neighbours(i).len(), std::cmp::Reverse(i)))
    }

    /// Writes the pattern into `net` with every property `Unset`. Returns the
    /// id given to each pattern index.
    pub fn install(&self, net: &mut Net, provenance: Provenance) -> Result<Vec<NodeId>, ReasoningError> {
        self.validate()?;
        let mut ids = vec![None; self.len()];
        let unset = |names: &BTreeSet<PropertyName>| {
            names
                .iter()
                .map(|n| (n.as_str().to_string(), Value::Unset))
                .collect::<Vec<_>>()
        };
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Object {
                let id = net.add_object(unset(&n.names))?;
                ids[i] = Some(id);
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Action {
                let subject = n.subject.and_then(|s| ids[s]);
                let target = ids[n.target.expect("validated")].expect("objects first");
                let id = net.add_action(subject, target, None, unset(&n.names))?;
                ids[i] = Some(id);
            }
        }
        let ids: Vec<NodeId> = ids.into_iter().map(|i| i.expect("all placed")).collect();
        if provenance != Provenance::Asserted {
            for &id in &ids {
                net.mark_origin(id, provenance);
            }
        }
        Ok(ids)
    }

    pub fn canonical_form(&self) -> String {
        super::canon::canonical_form(self)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plural = |n: usize, w: &str| format!("{n} {w}{}", if n == 1 { "" } else { "s" });
        write!(
            f,
            "{}, {}",
            plural(self.object_count(), "object"),
            plural(self.action_count(), "action")
        )
    }
}
