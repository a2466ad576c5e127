//! Concept mining: every connected, action-closed subnet up to a size bound
//! is enumerated once (ESU-style extension sets), labelled canonically and
//! counted. Patterns seen at least `min_support` times, and not contained in
//! a larger such pattern, are the concepts.

use std::collections::{BTreeMap, BTreeSet};

use super::concept::ConceptTemplate;
use super::pattern::Pattern;
use super::ReasoningError;
use crate::net::{Net, NodeId};

pub const DEFAULT_MAX_PATTERN_NODES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MineConfig {
    pub min_support: usize,
    pub max_pattern_nodes: usize,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            min_support: 2,
            max_pattern_nodes: DEFAULT_MAX_PATTERN_NODES,
        }
    }
}

impl MineConfig {
    fn check(&self) -> Result<(), ReasoningError> {
        if self.min_support < 2 {
            return Err(ReasoningError::InvalidConfig(format!(
                "min_support must be at least 2, got {}",
                self.min_support
            )));
        }
        if !(1..=DEFAULT_MAX_PATTERN_NODES).contains(&self.max_pattern_nodes) {
            return Err(ReasoningError::InvalidConfig(format!(
                "max_pattern_nodes must be within 1..={DEFAULT_MAX_PATTERN_NODES}, got {}",
                self.max_pattern_nodes
            )));
        }
        Ok(())
    }
}

/// Calls `visit` once for every connected subset of `allowed` with at most
/// `limit` nodes.
fn connected_subsets(
    net: &Net,
    allowed: &BTreeSet<NodeId>,
    limit: usize,
    visit: &mut dyn FnMut(&BTreeSet<NodeId>),
) {
    let nbrs = |n: NodeId| -> Vec<NodeId> {
        net.neighbours(n)
            .into_iter()
            .filter(|m| allowed.contains(m))
            .collect()
    };
    for &v in allowed {
        let sub = BTreeSet::from([v]);
        let ext: Vec<NodeId> = nbrs(v).into_iter().filter(|&u| u > v).collect();
        grow(&sub, ext, v, limit, &nbrs, visit);
    }
}

fn grow(
    sub: &BTreeSet<NodeId>,
    mut ext: Vec<NodeId>,
    root: NodeId,
    limit: usize,
    nbrs: &dyn Fn(NodeId) -> Vec<NodeId>,
    visit: &mut dyn FnMut(&BTreeSet<NodeId>),
) {
    visit(sub);
    if sub.len() == limit {
        return;
    }
    let near: BTreeSet<NodeId> = sub.iter().flat_map(|&s| nbrs(s)).chain(sub.iter().copied()).collect();
    while let Some(w) = ext.pop() {
        let mut next_ext = ext.clone();
        for u in nbrs(w) {
            if u > root && !near.contains(&u) && !next_ext.contains(&u) {
                next_ext.push(u);
            }
        }
        let mut next = sub.clone();
        next.insert(w);
        grow(&next, next_ext, root, limit, nbrs, visit);
    }
}

/// Every action in the set has its endpoints in the set.
fn action_closed(net: &Net, set: &BTreeSet<NodeId>) -> bool {
    set.iter().all(|&id| match net.action(id) {
        Some(a) => set.contains(&a.target()) && a.subject().is_none_or(|s| set.contains(&s)),
        None => true,
    })
}

/// Occurrences of every connected, action-closed subnet of `net` with at
/// most `max_nodes` nodes, grouped by canonical form.
pub fn occurrences(net: &Net, max_nodes: usize) -> BTreeMap<String, Vec<BTreeSet<NodeId>>> {
    let all: BTreeSet<NodeId> = net.node_ids().into_iter().collect();
    let mut out: BTreeMap<String, Vec<BTreeSet<NodeId>>> = BTreeMap::new();
    connected_subsets(net, &all, max_nodes, &mut |s| {
        if action_closed(net, s) {
            let (p, _) = Pattern::from_subnet(net, s).expect("closed subset");
            out.entry(p.canonical_form()).or_default().push(s.clone());
        }
    });
    out
}

struct Candidate {
    form: String,
    size: usize,
    support: usize,
    net: usize,
    witness: BTreeSet<NodeId>,
}

/// Mines concept templates from `nets`. Support counts distinct node sets
/// across all nets. Results are ordered by support, largest first, then by
/// canonical form.
pub fn mine_concepts(nets: &[Net], config: MineConfig) -> Result<Vec<ConceptTemplate>, ReasoningError> {
    config.check()?;
    let mut table: BTreeMap<String, Candidate> = BTreeMap::new();
    for (k, net) in nets.iter().enumerate() {
        for (form, occ) in occurrences(net, config.max_pattern_nodes) {
            let c = table.entry(form.clone()).or_insert_with(|| Candidate {
                form,
                size: occ[0].len(),
                support: 0,
                net: k,
                witness: occ[0].clone(),
            });
            c.support += occ.len();
        }
    }
    let mut frequent: Vec<&Candidate> = table
        .values()
        .filter(|c| c.support >= config.min_support)
        .collect();
    frequent.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.form.cmp(&b.form)));

    // Walk from the largest down. A pattern not yet covered is maximal, and
    // everything inside one of its occurrences is covered by it.
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    let mut maximal = Vec::new();
    for c in frequent {
        if covered.contains(c.form.as_str()) {
            continue;
        }
        let net = &nets[c.net];
        let mut inner = Vec::new();
        connected_subsets(net, &c.witness, c.size, &mut |s| {
            if s.len() < c.size && action_closed(net, s) {
                inner.push(Pattern::from_subnet(net, s).expect("closed").0.canonical_form());
            }
        });
        for f in inner {
            if let Some((k, _)) = table.get_key_value(&f) {
                covered.insert(k.as_str());
            }
        }
        maximal.push(c);
    }
    let mut out: Vec<ConceptTemplate> = maximal
        .into_iter()
        .map(|c| {
            let (mut pattern, _) = Pattern::from_subnet(&nets[c.net], &c.witness).expect("closed");
            pattern.root = pattern.hub();
            ConceptTemplate {
                id: None,
                pattern,
                support: c.support,
                parent: None,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.support
            .cmp(&a.support)
            .then_with(|| a.pattern.canonical_form().cmp(&b.pattern.canonical_form()))
    });
    Ok(out)
}
