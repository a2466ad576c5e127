//! The self object: goals, anti-goals and the comparison of what the net
//! believes with what was sensed.
//!
//! The self node is an ordinary object. Goals are stored on it as text
//! properties named `goal:<n>` and `antigoal:<n>`, so they persist with the
//! net and reattach on load.

use std::fmt;

use thiserror::Error;

use crate::net::{Net, NetError, NodeId, NodeKind, PropertyName, Provenance, SenseEntry, Value};
use crate::reasoning::{Fragment, Truth};
use crate::script::PropertyChange;
use crate::sim::{diff_states, Snapshot, State};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("self node {0} is not an object")]
    NotAnObject(NodeId),
    #[error("malformed condition: {0}")]
    MalformedCondition(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoalId(pub u64);

impl fmt::Display for GoalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Goal,
    AntiGoal,
}

impl Polarity {
    fn prefix(self) -> &'static str {
        match self {
            Polarity::Goal => "goal:",
            Polarity::AntiGoal => "antigoal:",
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Polarity::Goal => "goal",
            Polarity::AntiGoal => "antigoal",
        }
    }
}

/// A fragment asked about one node. Text form: `@<node-id> <fragment>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub anchor: NodeId,
    pub fragment: Fragment,
}

impl Condition {
    pub fn new(anchor: NodeId, fragment: Fragment) -> Self {
        Condition { anchor, fragment }
    }

    pub fn parse(text: &str) -> Result<Self, AgentError> {
        let bad = |why: &str| AgentError::MalformedCondition(format!("{why} in {text:?}"));
        let rest = text.trim().strip_prefix('@').ok_or_else(|| bad("missing @<node>"))?;
        let (id, frag) = rest.split_once(' ').ok_or_else(|| bad("missing fragment"))?;
        let id = id
            .parse::<u64>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| bad("bad node id"))?;
        let fragment = Fragment::parse(frag).map_err(|e| AgentError::MalformedCondition(e.to_string()))?;
        Ok(Condition {
            anchor: NodeId::new(id),
            fragment,
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{} {}", self.anchor, self.fragment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub id: GoalId,
    pub polarity: Polarity,
    pub condition: Condition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalStatus {
    Satisfied,
    Violated,
    Undetermined,
}

impl GoalStatus {
    pub fn keyword(self) -> &'static str {
        match self {
            GoalStatus::Satisfied => "satisfied",
            GoalStatus::Violated => "violated",
            GoalStatus::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfModel {
    self_node: NodeId,
    goals: Vec<Goal>,
    next_goal: u64,
}

impl SelfModel {
    /// Makes `self_node` the agent's self, starts the net's sense log and
    /// picks up any goals already stored on the node.
    pub fn attach(net: &mut Net, self_node: NodeId) -> Result<Self, AgentError> {
        if net.kind_of(self_node) != Some(NodeKind::Object) {
            return Err(AgentError::NotAnObject(self_node));
        }
        net.attach_sense_log();
        let mut goals = Vec::new();
        for (name, rec) in net.properties(self_node)? {
            let (polarity, n) = if let Some(n) = name.as_str().strip_prefix("goal:") {
                (Polarity::Goal, n)
            } else if let Some(n) = name.as_str().strip_prefix("antigoal:") {
                (Polarity::AntiGoal, n)
            } else {
                continue;
            };
            let Ok(n) = n.parse::<u64>() else {
                continue;
            };
            let Some(Value::Text(text)) = rec.value() else { continue };
            goals.push(Goal {
                id: GoalId(n),
                polarity,
                condition: Condition::parse(text)?,
            });
        }
        goals.sort_by_key(|g| g.id);
        let next_goal = goals.last().map_or(1, |g| g.id.0 + 1);
        Ok(SelfModel {
            self_node,
            goals,
            next_goal,
        })
    }

    pub fn self_node(&self) -> NodeId {
        self.self_node
    }

    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    /// Stores a goal or anti-goal. Identical conditions get distinct ids.
    pub fn define_goal(&mut self, net: &mut Net, polarity: Polarity, condition: Condition) -> Result<GoalId, AgentError> {
        if !net.contains(condition.anchor) {
            return Err(AgentError::MalformedCondition(format!(
                "unknown node {}",
                condition.anchor
            )));
        }
        let id = GoalId(self.next_goal);
        let name = PropertyName::new(format!("{}{}", polarity.prefix(), id.0))?;
        net.set_property(
            self.self_node,
            name.as_str(),
            Value::Text(condition.to_string()),
            Provenance::Asserted,
        )?;
        self.next_goal += 1;
        self.goals.push(Goal {
            id,
            polarity,
            condition,
        });
        Ok(id)
    }

    pub fn define_goal_text(&mut self, net: &mut Net, polarity: Polarity, text: &str) -> Result<GoalId, AgentError> {
        let condition = Condition::parse(text)?;
        self.define_goal(net, polarity, condition)
    }

    /// A goal is satisfied when its condition holds; an anti-goal is violated
    /// when it holds. Conditions that cannot be decided leave the goal
    /// undetermined.
    pub fn evaluate_goals(&self, net: &Net) -> Vec<(GoalId, GoalStatus)> {
        self.goals
            .iter()
            .map(|g| {
                let truth = g.condition.fragment.evaluate(net, g.condition.anchor, true);
                let status = match (g.polarity, truth) {
                    (_, Truth::Unknown) => GoalStatus::Undetermined,
                    (Polarity::Goal, Truth::True) | (Polarity::AntiGoal, Truth::False) => GoalStatus::Satisfied,
                    _ => GoalStatus::Violated,
                };
                (g.id, status)
            })
            .collect()
    }

    pub fn sense_log<'a>(&self, net: &'a Net) -> &'a [SenseEntry] {
        net.sense_log()
    }
}

/// What the senses last reported, one entry per sensed (object, property).
pub fn reality(net: &Net) -> Snapshot {
    let mut state = State::new();
    for e in net.sense_log() {
        state.insert((e.object, e.name.clone()), Value::Signal(e.signal.clone()));
    }
    Snapshot {
        tick: net.sense_log().last().map_or(0, |e| e.tick),
        state,
    }
}

/// Disagreements between a prediction and what was sensed. Only sensed keys
/// count: reality says nothing about what was not observed.
pub fn compare_with_reality(predicted: &Snapshot, sensed: &Snapshot) -> Vec<PropertyChange> {
    let restricted: State = predicted
        .state
        .iter()
        .filter(|(k, _)| sensed.state.contains_key(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    diff_states(&restricted, &sensed.state)
}
