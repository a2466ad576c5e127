use super::pattern::{names_of, Pattern};
use crate::net::{Net, NodeId, NodeKind};

/// An embedding of a pattern: `mapping[i]` is the net node playing pattern
/// node `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub mapping: Vec<NodeId>,
}

/// Whether net node `id` can play pattern node `i`: same kind and at least
/// the pattern's property names.
pub(crate) fn compatible(p: &Pattern, i: usize, net: &Net, id: NodeId) -> bool {
    net.kind_of(id) == Some(p.nodes[i].kind) && names_of(net, id).is_superset(&p.nodes[i].names)
}

/// Links between pattern node `i` and already placed nodes must exist in the
/// net with the same roles.
pub(crate) fn consistent(p: &Pattern, net: &Net, assign: &[Option<NodeId>], i: usize, id: NodeId) -> bool {
    let node = &p.nodes[i];
    match node.kind {
        NodeKind::Action => {
            let a = net.action(id).expect("kind checked");
            let subject_ok = match node.subject {
                None => a.subject().is_none(),
                Some(s) => assign[s].is_none_or(|m| a.subject() == Some(m)),
            };
            let target_ok = node.target.and_then(|t| assign[t]).is_none_or(|m| a.target() == m);
            subject_ok && target_ok
        }
        NodeKind::Object => p.nodes.iter().enumerate().all(|(j, other)| {
            let Some(m) = assign[j] else { return true };
            if other.kind != NodeKind::Action {
                return true;
            }
            let a = net.action(m).expect("placed action");
            (other.subject != Some(i) || a.subject() == Some(id))
                && (other.target != Some(i) || a.target() == id)
        }),
    }
}

fn candidates(p: &Pattern, net: &Net, assign: &[Option<NodeId>], i: usize, parent: Option<usize>) -> Vec<NodeId> {
    let Some(pm) = parent.and_then(|q| assign[q]) else {
        return net
            .node_ids()
            .into_iter()
            .filter(|&n| net.kind_of(n) == Some(p.nodes[i].kind))
            .collect();
    };
    let mut out = net.neighbours(pm);
    out.sort_unstable();
    out
}

/// Every injective embedding of `pattern` into `net`, in lexicographic order
/// of the mapping. Values are ignored; net nodes may carry extra names and
/// extra links.
pub fn find_matches(pattern: &Pattern, net: &Net) -> Vec<Match> {
    if pattern.is_empty() {
        return Vec::new();
    }
    // Cover every component: start a new BFS wherever the last one stopped.
    let mut order: Vec<(usize, Option<usize>)> = Vec::new();
    let mut placed = vec![false; pattern.len()];
    for s in 0..pattern.len() {
        if !placed[s] {
            for (i, par) in pattern.bfs(s) {
                placed[i] = true;
                order.push((i, par));
            }
        }
    }
    let mut out = Vec::new();
    let mut assign = vec![None; pattern.len()];
    let mut used = std::collections::BTreeSet::new();
    extend(pattern, net, &order, 0, &mut assign, &mut used, &mut out);
    out.sort();
    out
}

fn extend(
    p: &Pattern,
    net: &Net,
    order: &[(usize, Option<usize>)],
    k: usize,
    assign: &mut Vec<Option<NodeId>>,
    used: &mut std::collections::BTreeSet<NodeId>,
    out: &mut Vec<Match>,
) {
    if k == order.len() {
        out.push(Match {
            mapping: assign.iter().map(|a| a.expect("complete")).collect(),
        });
        return;
    }
    let (i, parent) = order[k];
    for id in candidates(p, net, assign, i, parent) {
        if used.contains(&id) || !compatible(p, i, net, id) || !consistent(p, net, assign, i, id) {
            continue;
        }
        assign[i] = Some(id);
        used.insert(id);
        extend(p, net, order, k + 1, assign, used, out);
        used.remove(&id);
        assign[i] = None;
    }
}
