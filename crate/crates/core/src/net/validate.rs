use std::collections::BTreeSet;

use super::{Net, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    /// A link joins two actions, or two objects.
    BipartiteViolation,
    /// An action endpoint and the endpoint's action list disagree.
    SymmetryBreak,
    /// A link names an id that is not live.
    DanglingReference,
    /// The same id is registered as both an object and an action.
    DuplicateId,
    /// A live id at or above the allocation counter.
    IdAboveCounter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub ids: Vec<NodeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViolationReport {
    violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    fn push(&mut self, kind: ViolationKind, ids: Vec<NodeId>) {
        self.violations.push(Violation { kind, ids });
    }
}

enum Endpoint {
    Object,
    Action,
    Missing,
}

pub(super) fn validate(net: &Net) -> ViolationReport {
    let mut report = ViolationReport::default();
    let classify = |id: NodeId| {
        if net.objects.contains_key(&id) {
            Endpoint::Object
        } else if net.actions.contains_key(&id) {
            Endpoint::Action
        } else {
            Endpoint::Missing
        }
    };

    for id in net.objects.keys() {
        if net.actions.contains_key(id) {
            report.push(ViolationKind::DuplicateId, vec![*id]);
        }
    }
    for id in net.objects.keys().chain(net.actions.keys()) {
        if id.get() >= net.next_id {
            report.push(ViolationKind::IdAboveCounter, vec![*id]);
        }
    }

    for (id, action) in &net.actions {
        let ends = action
            .subject
            .map(|s| (s, true))
            .into_iter()
            .chain([(action.target, false)]);
        for (end, is_subject) in ends {
            match classify(end) {
                Endpoint::Action => report.push(ViolationKind::BipartiteViolation, vec![*id, end]),
                Endpoint::Missing => report.push(ViolationKind::DanglingReference, vec![*id, end]),
                Endpoint::Object => {
                    let obj = &net.objects[&end];
                    let list = if is_subject {
                        &obj.outgoing
                    } else {
                        &obj.incoming
                    };
                    if !list.contains(id) {
                        report.push(ViolationKind::SymmetryBreak, vec![*id, end]);
                    }
                }
            }
        }
    }

    for (id, obj) in &net.objects {
        for (list, is_outgoing) in [(&obj.outgoing, true), (&obj.incoming, false)] {
            let mut seen = BTreeSet::new();
            for a in list {
                if !seen.insert(*a) {
                    report.push(ViolationKind::SymmetryBreak, vec![*id, *a]);
                    continue;
                }
                match classify(*a) {
                    Endpoint::Object => {
                        report.push(ViolationKind::BipartiteViolation, vec![*id, *a])
                    }
                    Endpoint::Missing => {
                        report.push(ViolationKind::DanglingReference, vec![*id, *a])
                    }
                    Endpoint::Action => {
                        let action = &net.actions[a];
                        let agrees = if is_outgoing {
                            action.subject == Some(*id)
                        } else {
                            action.target == *id
                        };
                        if !agrees {
                            report.push(ViolationKind::SymmetryBreak, vec![*id, *a]);
                        }
                    }
                }
            }
        }
    }

    for &(inst, concept) in &net.isa {
        for end in [inst, concept] {
            match classify(end) {
                Endpoint::Object => {}
                Endpoint::Action => {
                    report.push(ViolationKind::BipartiteViolation, vec![inst, concept])
                }
                Endpoint::Missing => {
                    report.push(ViolationKind::DanglingReference, vec![inst, concept])
                }
            }
        }
    }

    report
}
