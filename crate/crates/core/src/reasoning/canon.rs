//! Canonical labelling of patterns by colour refinement with
//! individualisation.
//!
//! Two patterns get the same form exactly when they are isomorphic with
//! equal kinds and property-name sets. Leaves of the search tree are
//! compared as strings and the least one wins, so ties fall to the
//! lexicographically smallest property-name sequence.

use super::pattern::Pattern;
use crate::net::NodeKind;

/// Edge role as seen from one endpoint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Port {
    /// Seen from an action: this neighbour is my subject.
    HasSubject,
    HasTarget,
    /// Seen from an object: this neighbour action has me as subject.
    SubjectOf,
    TargetOf,
}

struct Graph {
    base: Vec<String>,
    adj: Vec<Vec<(Port, usize)>>,
}

fn node_label(p: &Pattern, i: usize) -> String {
    let n = &p.nodes[i];
    let kind = match n.kind {
        NodeKind::Object => 'O',
        NodeKind::Action => 'A',
    };
    let names: Vec<&str> = n.names.iter().map(|n| n.as_str()).collect();
    format!("{kind}({})", names.join(","))
}

impl Graph {
    fn new(p: &Pattern) -> Self {
        let n = p.len();
        let mut adj = vec![Vec::new(); n];
        for (i, node) in p.nodes.iter().enumerate() {
            if let Some(s) = node.subject {
                adj[i].push((Port::HasSubject, s));
                adj[s].push((Port::SubjectOf, i));
            }
            if let Some(t) = node.target {
                adj[i].push((Port::HasTarget, t));
                adj[t].push((Port::TargetOf, i));
            }
        }
        Graph {
            base: (0..n).map(|i| node_label(p, i)).collect(),
            adj,
        }
    }

    /// Colours from sorted keys, so equal keys share a colour and the
    /// numbering is invariant under relabelling.
    fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
        let mut sorted = keys.to_vec();
        sorted.sort();
        sorted.dedup();
        keys.iter()
            .map(|k| sorted.binary_search(k).expect("present"))
            .collect()
    }

    fn refine(&self, mut colours: Vec<usize>) -> Vec<usize> {
        loop {
            let keys: Vec<(usize, Vec<(Port, usize)>)> = (0..colours.len())
                .map(|v| {
                    let mut sig: Vec<(Port, usize)> =
                        self.adj[v].iter().map(|&(p, u)| (p, colours[u])).collect();
                    sig.sort();
                    (colours[v], sig)
                })
                .collect();
            let next = Self::rank(&keys);
            let classes = |c: &[usize]| c.iter().collect::<std::collections::BTreeSet<_>>().len();
            if classes(&next) == classes(&colours) {
                return next;
            }
            colours = next;
        }
    }

    fn encode(&self, p: &Pattern, colours: &[usize]) -> String {
        let mut order: Vec<usize> = (0..colours.len()).collect();
        order.sort_by_key(|&v| colours[v]);
        let mut pos = vec![0; order.len()];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut out = String::new();
        for &v in &order {
            out.push_str(&self.base[v]);
            let node = &p.nodes[v];
            if node.kind == NodeKind::Action {
                match node.subject {
                    Some(s) => out.push_str(&format!("s{}", pos[s])),
                    None => out.push_str("s-"),
                }
                if let Some(t) = node.target {
                    out.push_str(&format!("t{}", pos[t]));
                }
            }
            out.push(';');
        }
        out
    }

    fn search(&self, p: &Pattern, colours: Vec<usize>, best: &mut Option<String>) {
        let colours = self.refine(colours);
        let mut counts = vec![0usize; colours.len()];
        for &c in &colours {
            counts[c] += 1;
        }
        let Some(cell) = (0..counts.len()).find(|&c| counts[c] > 1) else {
            let code = self.encode(p, &colours);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        };
        for v in (0..colours.len()).filter(|&v| colours[v] == cell) {
            let split: Vec<usize> = colours
                .iter()
                .enumerate()
                .map(|(w, &c)| 2 * c + usize::from(c == cell && w != v))
                .collect();
            self.search(p, split, best);
        }
    }
}

/// A string that identifies the pattern up to isomorphism.
pub fn canonical_form(p: &Pattern) -> String {
    if p.is_empty() {
        return String::new();
    }
    let g = Graph::new(p);
    let start = Graph::rank(&g.base);
    let mut best = None;
    g.search(p, start, &mut best);
    best.expect("at least one leaf")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::PropertyName;
    use crate::reasoning::PatternNode;

    fn pn(s: &str) -> PropertyName {
        PropertyName::new(s).unwrap()
    }

    fn star(order: &[&str]) -> Pattern {
        let mut nodes = vec![PatternNode::object([pn("body")])];
        for part in order {
            let o = nodes.len();
            nodes.push(PatternNode::object([pn(part)]));
            nodes.push(PatternNode::action(Some(0), o, [pn("has")]));
        }
        Pattern { nodes, root: None }
    }

    #[test]
    fn invariant_under_reordering() {
        let a = star(&["arm", "leg", "arm", "head"]);
        let b = star(&["head", "arm", "arm", "leg"]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        let c = star(&["head", "arm", "leg", "leg"]);
        assert_ne!(canonical_form(&a), canonical_form(&c));
    }

    #[test]
    fn direction_matters() {
        let fwd = Pattern {
            nodes: vec![
                PatternNode::object([pn("a")]),
                PatternNode::object([pn("b")]),
                PatternNode::action(Some(0), 1, []),
            ],
            root: None,
        };
        let mut back = fwd.clone();
        back.nodes[2] = PatternNode::action(Some(1), 0, []);
        assert_ne!(canonical_form(&fwd), canonical_form(&back));
        let mut blank = fwd.clone();
        blank.nodes[2] = PatternNode::action(None, 1, []);
        assert_ne!(canonical_form(&fwd), canonical_form(&blank));
    }

    #[test]
    fn symmetric_cycle() {
        // o0 -> o1 -> o2 -> o0, all alike: any rotation gives one form.
        let mk = |shift: usize| {
            let mut nodes: Vec<PatternNode> = (0..3).map(|_| PatternNode::object([])).collect();
            for k in 0..3 {
                let s = (k + shift) % 3;
                nodes.push(PatternNode::action(Some(s), (s + 1) % 3, []));
            }
            Pattern { nodes, root: None }
        };
        assert_eq!(canonical_form(&mk(0)), canonical_form(&mk(1)));
    }
}
