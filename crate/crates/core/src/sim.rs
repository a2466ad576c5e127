//! Inference by modelling: run actions, keep snapshots of the net in time
//! order, and detect and name changes between them.
//!
//! Change detection needs two snapshots. There is no notion of "what changed"
//! without a remembered earlier state.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::lexicon::{LangTag, Lexicon};
use crate::net::{Net, NodeId, PropertyName, ScriptRef, Value};
use crate::script::{self, ChangeSet, ExecContext, ExecError, PropertyChange, Role};
use crate::store::{StoreError, StoreHandle};

/// Environment variable naming an extra change-verb table file.
pub const VERB_TABLE_ENV: &str = "KRN_VERB_TABLE";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("node {0} is not an action in the net")]
    UnknownAction(NodeId),
    #[error("action {0} has no script")]
    UnknownScript(NodeId),
    #[error("action {0} has an unloaded script and no store to load it from")]
    Unhydrated(NodeId),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("verb table line {line}: {message}")]
    VerbTable { line: usize, message: String },
}

/// A batch stopped at `index`. Actions before it ran and their effects stay.
#[derive(Debug, Error)]
#[error("action at position {index} failed: {source}")]
pub struct BatchError {
    pub index: usize,
    pub completed: Vec<ChangeSet>,
    #[source]
    pub source: SimError,
}

pub type State = BTreeMap<(NodeId, PropertyName), Value>;

/// Hydrated property values at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tick: u64,
    pub state: State,
}

impl Snapshot {
    pub fn get(&self, node: NodeId, name: &str) -> Option<&Value> {
        self.state.iter().find(|((n, p), _)| *n == node && p.as_str() == name).map(|(_, v)| v)
    }
}

/// Snapshots in tick order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timeline {
    snapshots: Vec<Snapshot>,
}

impl Timeline {
    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn latest(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    pub fn at(&self, tick: u64) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&tick, |s| s.tick)
            .ok()
            .map(|i| &self.snapshots[i])
    }

    fn push(&mut self, snap: Snapshot) {
        debug_assert!(self.latest().is_none_or(|l| l.tick < snap.tick));
        self.snapshots.push(snap);
    }
}

/// Every hydrated property value in the net. Stubs are skipped, so this never
/// triggers loading.
pub fn capture_state(net: &Net) -> State {
    let mut state = State::new();
    for id in net.node_ids() {
        for (name, rec) in net.properties(id).expect("listed node") {
            if let Some(v) = rec.value() {
                state.insert((id, name.clone()), v.clone());
            }
        }
    }
    state
}

/// Captures the net under a fresh tick and appends it to the net's timeline.
pub fn snapshot(net: &mut Net) -> Snapshot {
    let snap = Snapshot {
        tick: net.tick(),
        state: capture_state(net),
    };
    net.timeline.push(snap.clone());
    snap
}

/// Differences from `a` to `b`, ordered by node then property name. A value
/// that appears has no `before`; one that disappears has no `after`.
pub fn diff(a: &Snapshot, b: &Snapshot) -> Vec<PropertyChange> {
    diff_states(&a.state, &b.state)
}

pub fn diff_states(a: &State, b: &State) -> Vec<PropertyChange> {
    let mut keys: Vec<&(NodeId, PropertyName)> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|k| {
            let before = a.get(k);
            let after = b.get(k);
            let same = match (before, after) {
                (Some(x), Some(y)) => same_value(x, y),
                (None, None) => true,
                _ => false,
            };
            (!same).then(|| PropertyChange {
                node: k.0,
                name: k.1.clone(),
                before: before.cloned(),
                after: after.cloned(),
            })
        })
        .collect()
}

fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x == y || (x.is_nan() && y.is_nan()),
        _ => a == b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    /// Node bound to `self` in scripts.
    pub self_node: Option<NodeId>,
    pub step_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            self_node: None,
            step_budget: script::DEFAULT_STEP_BUDGET,
        }
    }
}

pub fn run_action(net: &mut Net, action: NodeId, store: Option<&mut StoreHandle>) -> Result<ChangeSet, SimError> {
    run_action_with(net, action, store, &RunConfig::default())
}

/// Executes the script of `action` with its subject and target bound, taking a
/// snapshot before and after. A stubbed script, and any stubbed property the
/// script mentions, are loaded from `store` first.
pub fn run_action_with(
    net: &mut Net,
    action: NodeId,
    mut store: Option<&mut StoreHandle>,
    config: &RunConfig,
) -> Result<ChangeSet, SimError> {
    let rec = net.action(action).ok_or(SimError::UnknownAction(action))?;
    let (subject, target) = (rec.subject(), rec.target());
    let ast = match rec.script() {
        ScriptRef::Loaded { ast, .. } => ast.clone(),
        ScriptRef::None => return Err(SimError::UnknownScript(action)),
        ScriptRef::Stub { .. } => match store.as_deref_mut() {
            Some(h) => h.hydrate_script(action, net)?,
            None => return Err(SimError::Unhydrated(action)),
        },
    };
    if let Some(h) = store {
        for lv in ast.lvalues() {
            let node = match lv.role {
                Role::Subject => subject,
                Role::Object => Some(target),
                Role::Itself => config.self_node,
            };
            let Some(node) = node else { continue };
            let stub = net
                .property(node, lv.name.as_str())
                .is_ok_and(|p| p.value().is_none());
            if stub {
                h.hydrate_property(node, lv.name.as_str(), net)?;
            }
        }
    }
    snapshot(net);
    let ctx = ExecContext::new(net, subject, target)
        .with_self(config.self_node)
        .with_budget(config.step_budget);
    let result = script::execute(&ast, ctx);
    snapshot(net);
    Ok(result?)
}

pub fn run_pending(
    net: &mut Net,
    order: &[NodeId],
    store: Option<&mut StoreHandle>,
) -> Result<Vec<ChangeSet>, BatchError> {
    run_pending_with(net, order, store, &RunConfig::default())
}

/// Runs actions in the given order, with a snapshot before and after the
/// whole batch besides the per-action ones. Stops at the first failure;
/// nothing already done is rolled back.
pub fn run_pending_with(
    net: &mut Net,
    order: &[NodeId],
    mut store: Option<&mut StoreHandle>,
    config: &RunConfig,
) -> Result<Vec<ChangeSet>, BatchError> {
    snapshot(net);
    let mut done = Vec::with_capacity(order.len());
    for (index, &id) in order.iter().enumerate() {
        match run_action_with(net, id, store.as_deref_mut(), config) {
            Ok(cs) => done.push(cs),
            Err(source) => {
                snapshot(net);
                return Err(BatchError {
                    index,
                    completed: done,
                    source,
                });
            }
        }
    }
    snapshot(net);
    Ok(done)
}

/// Maps property names to change-verb keys. Keys are rendered to words
/// through the lexicon's term table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbTable {
    verbs: BTreeMap<PropertyName, String>,
}

impl Default for VerbTable {
    fn default() -> Self {
        let mut t = VerbTable::empty();
        t.insert(PropertyName::new("position").expect("valid"), "moving");
        t.insert(PropertyName::new("colour").expect("valid"), "changing-colour");
        t
    }
}

impl VerbTable {
    pub fn empty() -> Self {
        VerbTable {
            verbs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, property: PropertyName, verb: impl Into<String>) {
        self.verbs.insert(property, verb.into());
    }

    pub fn verb_for(&self, property: &str) -> Option<&str> {
        self.verbs.get(property).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PropertyName, &str)> + '_ {
        self.verbs.iter().map(|(k, v)| (k, v.as_str()))
    }

    /// Adds `VERB <property-name> <verb-key>` lines. Blank lines and `#`
    /// comments are ignored; later lines override earlier ones.
    pub fn extend_from_str(&mut self, text: &str) -> Result<(), SimError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| SimError::VerbTable {
                line: i + 1,
                message: message.to_string(),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["VERB", prop, verb] => {
                    let prop = PropertyName::new(*prop).map_err(|_| bad("bad property name"))?;
                    self.insert(prop, *verb);
                }
                ["VERB", ..] => return Err(bad("expected VERB <property> <verb>")),
                _ => return Err(bad("unknown record")),
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::VerbTable {
            line: 0,
            message: e.to_string(),
        })?;
        let mut t = VerbTable::default();
        t.extend_from_str(&text)?;
        Ok(t)
    }

    /// The default table, extended from the file named by `KRN_VERB_TABLE`
    /// when that is set.
    pub fn from_env() -> Result<Self, SimError> {
        match std::env::var_os(VERB_TABLE_ENV) {
            Some(path) if !path.is_empty() => Self::load(path),
            _ => Ok(Self::default()),
        }
    }
}

/// Names the kind of change, in `lang` where the lexicon has a word for it and
/// otherwise by the verb key itself. Unmapped properties have no name.
pub fn classify_change(
    change: &PropertyChange,
    table: &VerbTable,
    lexicon: &Lexicon,
    lang: &LangTag,
) -> Option<String> {
    let key = table.verb_for(change.name.as_str())?;
    Some(
        lexicon
            .term(key, lang)
            .map_or_else(|| key.to_string(), |(word, _)| word.to_string()),
    )
}
