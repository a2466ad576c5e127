//! Command interpreter behind the `krn` binary. Batch files and the REPL go
//! through the same [`Session::run_command`].
//!
//! Nodes are named by their label in the session language (English unless
//! changed with `lang`) or by `#<id>`. Output is plain text, one fact per
//! line, in a stable order.

mod words;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::agent::{self, AgentError, Condition, Polarity, SelfModel};
use crate::lexicon::{LangTag, Lexicon, LexiconError};
use crate::net::{Net, NetError, NodeId, NodeKind, Provenance, SensorAddress, Value};
use crate::reasoning::{self, Answer, EndpointChoice, Fragment, FragmentError, MineConfig, ReasoningError};
use crate::script::PropertyChange;
use crate::sim::{self, RunConfig, SimError, Snapshot, VerbTable};
use crate::store::{self, StoreError, StoreHandle};
use crate::text::quote;

pub use words::{rest_after, split_commands, unquote, words};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("no node named {0:?}")]
    UnknownName(String),
    #[error("{name:?} names several nodes: {}", ids.iter().map(|i| format!("#{i}")).collect::<Vec<_>>().join(" "))]
    AmbiguousName { name: String, ids: Vec<NodeId> },
    #[error("no snapshot at tick {0}")]
    NoSnapshot(u64),
    #[error("no self node; use `self <node>` first")]
    NoSelf,
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Batch(#[from] sim::BatchError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Reasoning(#[from] ReasoningError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

const HELP: &str = "\
new | load <path> | open <path> | save <path> | stats
obj <name> [k=v ...] | act <subject|-> <target> [script='...'] [k=v ...] [as <name>]
set <node>.<prop> <value> | show <node>[.<prop>] | sense <node>.<prop> <origin> <payload>
run <action> | runs <a1> <a2> ... | snap | diff [<t1> <t2>]
collapse-obj <nodes...> as <name> | collapse-act <nodes...> [as <name>] | expand <node>
mine [--min-support N] [--max-nodes K] [<paths...>]
isa <inst> <concept> | shape <inst> | has <inst> <fragment>
label <node> <lang> <text> | say <node> [--lang L] | lang <tag>
self <node> | goal <condition> | antigoal <condition> | goals | compare";

type Props = Vec<(String, Value)>;

/// Interpreter state: the working net, its lexicon, an optional open store
/// and an optional self model.
pub struct Session {
    net: Net,
    lexicon: Lexicon,
    store: Option<StoreHandle>,
    self_model: Option<SelfModel>,
    verbs: VerbTable,
    lang: LangTag,
    base: PathBuf,
    /// Ticks of the snapshots taken with `snap`.
    marks: Vec<u64>,
}

impl Default for Session {
    fn default() -> Self {
        Session::with_verbs(VerbTable::default())
    }
}

impl Session {
    /// A session using the change-verb table from `KRN_VERB_TABLE`, if set.
    pub fn from_env() -> Result<Self, CliError> {
        Ok(Session::with_verbs(VerbTable::from_env()?))
    }

    pub fn with_verbs(verbs: VerbTable) -> Self {
        Session {
            net: Net::new(),
            lexicon: Lexicon::new(),
            store: None,
            self_model: None,
            verbs,
            lang: LangTag::new("en").expect("valid tag"),
            base: PathBuf::from("."),
            marks: Vec::new(),
        }
    }

    /// Relative paths in commands resolve against `dir`.
    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base = dir.into();
        self
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn store(&self) -> Option<&StoreHandle> {
        self.store.as_ref()
    }

    /// Runs every command in `text`, writing output lines to `out`. Stops at
    /// the first error, which is returned.
    pub fn run_batch(&mut self, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
        for cmd in split_commands(text)? {
            for line in self.run_command(&cmd)? {
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }

    /// Runs one command and returns its output lines.
    pub fn run_command(&mut self, cmd: &str) -> Result<Vec<String>, CliError> {
        let w = words(cmd);
        let Some(&verb) = w.first() else {
            return Ok(Vec::new());
        };
        let args = &w[1..];
        match verb {
            "help" => Ok(HELP.lines().map(str::to_string).collect()),
            "new" => {
                *self = Session::with_verbs(self.verbs.clone()).with_base_dir(self.base.clone());
                Ok(Vec::new())
            }
            "load" => self.load(args),
            "open" => self.open(args),
            "save" => {
                let [path] = args else { return usage("save <path>") };
                store::save(&self.net, &self.lexicon, self.path(path)?)?;
                Ok(Vec::new())
            }
            "stats" => {
                let s = self.store.as_ref().map(|h| h.stats()).unwrap_or_default();
                Ok(vec![format!(
                    "objects {}, properties {}, scripts {}, bytes {}",
                    s.objects_hydrated, s.properties_hydrated, s.scripts_hydrated, s.bytes_read
                )])
            }
            "obj" => self.obj(args),
            "act" => self.act(args),
            "set" => self.set(args),
            "show" => self.show(args),
            "sense" => self.sense(args),
            "run" => {
                let [name] = args else { return usage("run <action>") };
                let id = self.resolve(name)?;
                let config = self.run_config();
                let cs = sim::run_action_with(&mut self.net, id, self.store.as_mut(), &config)?;
                Ok(self.change_lines(&cs.net_effect()))
            }
            "runs" => {
                if args.is_empty() {
                    return usage("runs <a1> <a2> ...");
                }
                let ids = args.iter().map(|a| self.resolve(a)).collect::<Result<Vec<_>, _>>()?;
                let config = self.run_config();
                let sets = sim::run_pending_with(&mut self.net, &ids, self.store.as_mut(), &config)?;
                let mut out = Vec::new();
                for cs in sets {
                    out.extend(self.change_lines(&cs.net_effect()));
                }
                Ok(out)
            }
            "snap" => {
                let s = sim::snapshot(&mut self.net);
                self.marks.push(s.tick);
                Ok(vec![format!("tick {}", s.tick)])
            }
            "diff" => self.diff(args),
            "collapse-obj" => self.collapse_obj(args),
            "collapse-act" => self.collapse_act(args),
            "expand" => self.expand(args),
            "mine" => self.mine(args),
            "isa" => {
                let [inst, concept] = args else { return usage("isa <inst> <concept>") };
                let (i, c) = (self.resolve(inst)?, self.resolve(concept)?);
                self.net.add_isa(i, c)?;
                Ok(Vec::new())
            }
            "shape" => {
                let [inst] = args else { return usage("shape <inst>") };
                let id = self.resolve(inst)?;
                let mut created = 0;
                for concept in self.net.concepts_of(id) {
                    created += reasoning::shape(&mut self.net, id, concept)?.len();
                }
                Ok(vec![format!("{created} nodes created")])
            }
            "has" => {
                let (Some(inst), true) = (args.first(), args.len() >= 2) else {
                    return usage("has <inst> <fragment>");
                };
                let id = self.resolve(inst)?;
                let fragment = Fragment::parse(rest_after(cmd, 2))?;
                let answer = match reasoning::query_has(&mut self.net, id, &fragment) {
                    Answer::YesAsserted => "yes (asserted)",
                    Answer::YesInferred => "yes (inferred)",
                    Answer::Unknown => "unknown",
                };
                Ok(vec![answer.to_string()])
            }
            "label" => {
                let (Some(node), Some(lang), true) = (args.first(), args.get(1), args.len() >= 3) else {
                    return usage("label <node> <lang> <text>");
                };
                let id = self.resolve(node)?;
                let lang = LangTag::new(lang)?;
                let text = unquote(rest_after(cmd, 3))?;
                self.lexicon.set_label(id, lang, text);
                Ok(Vec::new())
            }
            "say" => self.say(args),
            "lang" => {
                let [tag] = args else { return usage("lang <tag>") };
                self.lang = LangTag::new(tag)?;
                Ok(Vec::new())
            }
            "self" => {
                let [node] = args else { return usage("self <node>") };
                let id = self.resolve(node)?;
                self.self_model = Some(SelfModel::attach(&mut self.net, id)?);
                Ok(Vec::new())
            }
            "goal" | "antigoal" => {
                let polarity = if verb == "goal" { Polarity::Goal } else { Polarity::AntiGoal };
                let condition = self.condition(rest_after(cmd, 1))?;
                let model = self.self_model.as_mut().ok_or(CliError::NoSelf)?;
                let id = model.define_goal(&mut self.net, polarity, condition)?;
                Ok(vec![format!("{} {id}", polarity.keyword())])
            }
            "goals" => {
                let model = self.self_model.as_ref().ok_or(CliError::NoSelf)?;
                let status = model.evaluate_goals(&self.net);
                Ok(model
                    .goals()
                    .iter()
                    .zip(status)
                    .map(|(g, (_, s))| {
                        format!(
                            "{} {} {}: {} {}",
                            g.polarity.keyword(),
                            g.id,
                            s.keyword(),
                            self.name_of(g.condition.anchor),
                            g.condition.fragment
                        )
                    })
                    .collect())
            }
            "compare" => {
                if self.self_model.is_none() {
                    return Err(CliError::NoSelf);
                }
                let predicted = Snapshot {
                    tick: self.net.now(),
                    state: sim::capture_state(&self.net),
                };
                let found = agent::compare_with_reality(&predicted, &agent::reality(&self.net));
                if found.is_empty() {
                    Ok(vec!["no discrepancies".into()])
                } else {
                    Ok(self.change_lines(&found))
                }
            }
            other => Err(CliError::UnknownCommand(other.to_string())),
        }
    }

    fn run_config(&self) -> RunConfig {
        RunConfig {
            self_node: self.self_model.as_ref().map(SelfModel::self_node),
            ..RunConfig::default()
        }
    }

    fn path(&self, word: &str) -> Result<PathBuf, CliError> {
        let p = PathBuf::from(unquote(word)?);
        Ok(if p.is_absolute() { p } else { self.base.join(p) })
    }

    fn load(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let [path] = args else { return usage("load <path>") };
        let mut handle = StoreHandle::open(self.path(path)?)?;
        let (net, lexicon) = handle.load_full()?;
        self.net = net;
        self.marks.clear();
        self.lexicon = lexicon;
        self.store = Some(handle);
        self.self_model = None;
        Ok(Vec::new())
    }

    /// Opens a store lazily: every node is present as a stub and values are
    /// read when a command needs them.
    fn open(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let [path] = args else { return usage("open <path>") };
        let mut handle = StoreHandle::open(self.path(path)?)?;
        let mut net = Net::new();
        let ids: Vec<NodeId> = handle.node_ids().collect();
        for id in ids {
            handle.load_stub(id, &mut net)?;
        }
        self.lexicon = handle.lexicon().clone();
        self.net = net;
        self.marks.clear();
        self.store = Some(handle);
        self.self_model = None;
        Ok(Vec::new())
    }

    fn resolve(&self, name: &str) -> Result<NodeId, CliError> {
        if let Some(raw) = name.strip_prefix('#') {
            let id = raw
                .parse::<u64>()
                .map(NodeId::new)
                .map_err(|_| CliError::UnknownName(name.to_string()))?;
            return if self.net.contains(id) {
                Ok(id)
            } else {
                Err(CliError::UnknownName(name.to_string()))
            };
        }
        let text = unquote(name)?;
        let langs = std::iter::once(&self.lang).chain(self.lexicon.fallback_chain());
        for lang in langs {
            let ids: Vec<NodeId> = self
                .lexicon
                .lookup(lang, &text)
                .into_iter()
                .filter(|&id| self.net.contains(id))
                .collect();
            match ids.len() {
                0 => continue,
                1 => return Ok(ids[0]),
                _ => return Err(CliError::AmbiguousName { name: text, ids }),
            }
        }
        Err(CliError::UnknownName(text))
    }

    fn name_of(&self, id: NodeId) -> String {
        match self.lexicon.label_of(id, &self.lang) {
            Ok((text, _)) if self.resolve(text).ok() == Some(id) => text.to_string(),
            _ => format!("#{id}"),
        }
    }

    fn parse_value(&self, word: &str) -> Result<Value, CliError> {
        if word.starts_with('"') || word.starts_with('\'') {
            return Ok(Value::Text(unquote(word)?));
        }
        Ok(match word {
            "true" => Value::Truth(true),
            "false" => Value::Truth(false),
            "unset" => Value::Unset,
            _ if word.starts_with('#') || word.starts_with('@') => Value::Ref(self.resolve(word.trim_start_matches('@'))?),
            _ => match word.parse::<f64>() {
                Ok(n) if n.is_finite() => Value::Number(n),
                _ => Value::Text(word.to_string()),
            },
        })
    }

    fn render_value(&self, v: &Value) -> String {
        match v {
            Value::Text(s) => quote(s),
            Value::Ref(id) => format!("@{}", self.name_of(*id)),
            other => other.to_string(),
        }
    }

    /// Splits `k=v` words into properties; other words are returned as-is.
    fn properties<'a>(&self, args: &[&'a str]) -> Result<(Props, Vec<&'a str>), CliError> {
        let mut props = Vec::new();
        let mut rest = Vec::new();
        for a in args {
            match a.split_once('=') {
                Some((k, v)) if !k.is_empty() && !k.contains(['"', '\'']) => {
                    props.push((k.to_string(), self.parse_value(v)?))
                }
                _ => rest.push(*a),
            }
        }
        Ok((props, rest))
    }

    fn obj(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let Some((name, rest)) = args.split_first() else {
            return usage("obj <name> [k=v ...]");
        };
        let (props, extra) = self.properties(rest)?;
        if !extra.is_empty() {
            return usage("obj <name> [k=v ...]");
        }
        let id = self.net.add_object(props)?;
        let name = unquote(name)?;
        self.lexicon.set_label(id, self.lang.clone(), name.clone());
        Ok(vec![format!("{name} #{id}")])
    }

    fn act(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        const USAGE: &str = "act <subject|-> <target> [script='...'] [k=v ...] [as <name>]";
        let (Some(&subject), Some(&target)) = (args.first(), args.get(1)) else {
            return usage(USAGE);
        };
        let subject = if subject == "-" { None } else { Some(self.resolve(subject)?) };
        let target = self.resolve(target)?;
        let mut rest = args[2..].to_vec();
        let mut label = None;
        if let Some(pos) = rest.iter().position(|w| *w == "as") {
            let [_, name] = rest[pos..] else { return usage(USAGE) };
            label = Some(unquote(name)?);
            rest.truncate(pos);
        }
        let mut script = None;
        rest.retain(|w| match w.strip_prefix("script=") {
            Some(s) => {
                script = Some(s.to_string());
                false
            }
            None => true,
        });
        let script = script.map(|s| unquote(&s)).transpose()?;
        let (props, extra) = self.properties(&rest)?;
        if !extra.is_empty() {
            return usage(USAGE);
        }
        let id = self.net.add_action(subject, target, script.as_deref(), props)?;
        let mut out = format!("#{id}");
        if let Some(name) = label {
            self.lexicon.set_label(id, self.lang.clone(), name.clone());
            out = format!("{name} #{id}");
        }
        Ok(vec![out])
    }

    fn node_prop(&self, word: &str) -> Result<(NodeId, String), CliError> {
        let (node, prop) = word
            .rsplit_once('.')
            .ok_or_else(|| CliError::Usage(format!("expected <node>.<property>, got {word}")))?;
        Ok((self.resolve(node)?, prop.to_string()))
    }

    fn hydrate(&mut self, id: NodeId, prop: &str) -> Result<(), CliError> {
        let stub = self
            .net
            .property(id, prop)
            .is_ok_and(|p| p.value().is_none());
        if let (true, Some(h)) = (stub, self.store.as_mut()) {
            h.hydrate_property(id, prop, &mut self.net)?;
        }
        Ok(())
    }

    fn set(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let [target, value] = args else { return usage("set <node>.<prop> <value>") };
        let (id, prop) = self.node_prop(target)?;
        let value = self.parse_value(value)?;
        self.net.set_property(id, &prop, value, Provenance::Asserted)?;
        Ok(Vec::new())
    }

    fn show(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let [target] = args else { return usage("show <node>[.<prop>]") };
        if !target.contains('.') || target.starts_with(['"', '\'']) {
            return self.show_node(self.resolve(target)?);
        }
        let (id, prop) = self.node_prop(target)?;
        self.hydrate(id, &prop)?;
        let rec = self.net.property(id, &prop)?;
        Ok(vec![match rec.value() {
            Some(Value::Text(s)) => s.clone(),
            Some(v) => self.render_value(v),
            None => "(not loaded)".to_string(),
        }])
    }

    fn show_node(&self, id: NodeId) -> Result<Vec<String>, CliError> {
        let mut out = Vec::new();
        let head = match self.net.kind_of(id) {
            Some(NodeKind::Action) => {
                let a = self.net.action(id).expect("kind checked");
                let subject = a.subject().map_or("-".to_string(), |s| self.name_of(s));
                format!("{} #{id} action {subject} -> {}", self.name_of(id), self.name_of(a.target()))
            }
            _ => format!("{} #{id} object", self.name_of(id)),
        };
        out.push(head);
        for (name, rec) in self.net.properties(id)? {
            let value = rec
                .value()
                .map_or("(not loaded)".to_string(), |v| self.render_value(v));
            let prov = match rec.provenance() {
                Provenance::Asserted => "",
                Provenance::Inferred => " (inferred)",
                Provenance::Sensed => " (sensed)",
            };
            out.push(format!("  {name} = {value}{prov}"));
        }
        if let Some(a) = self.net.action(id) {
            match a.script() {
                crate::net::ScriptRef::Loaded { source, .. } => out.push(format!("  script {}", quote(source))),
                crate::net::ScriptRef::Stub { .. } => out.push("  script (not loaded)".into()),
                crate::net::ScriptRef::None => {}
            }
        }
        let concepts: Vec<String> = self.net.concepts_of(id).into_iter().map(|c| self.name_of(c)).collect();
        if !concepts.is_empty() {
            out.push(format!("  isa {}", concepts.join(" ")));
        }
        Ok(out)
    }

    fn sense(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let [target, origin, payload] = args else {
            return usage("sense <node>.<prop> <origin> <payload>");
        };
        let (id, prop) = self.node_prop(target)?;
        let origin = SensorAddress::parse(origin)?;
        let signal = self.net.capture(origin, unquote(payload)?.into_bytes());
        self.net.ingest_signal(id, &prop, signal)?;
        Ok(Vec::new())
    }

    fn change_lines(&self, changes: &[PropertyChange]) -> Vec<String> {
        if changes.is_empty() {
            return vec!["no change".into()];
        }
        changes
            .iter()
            .map(|c| {
                let show = |v: &Option<Value>| v.as_ref().map_or("(none)".to_string(), |v| self.render_value(v));
                let mut line = format!(
                    "{}.{}: {} -> {}",
                    self.name_of(c.node),
                    c.name,
                    show(&c.before),
                    show(&c.after)
                );
                if let Some(verb) = sim::classify_change(c, &self.verbs, &self.lexicon, &self.lang) {
                    line.push_str(&format!(" ({verb})"));
                }
                line
            })
            .collect()
    }

    fn diff(&self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let snaps = self.net.timeline().snapshots();
        let (a, b) = match args {
            // The last two `snap`s, else the last two snapshots of any kind.
            [] => match self.marks[..] {
                [.., t1, t2] => {
                    let tl = self.net.timeline();
                    (tl.at(t1).ok_or(CliError::NoSnapshot(t1))?, tl.at(t2).ok_or(CliError::NoSnapshot(t2))?)
                }
                _ if snaps.len() >= 2 => (&snaps[snaps.len() - 2], &snaps[snaps.len() - 1]),
                _ => return usage("diff needs two snapshots; take them with `snap`"),
            },
            [t1, t2] => {
                let at = |t: &str| -> Result<&Snapshot, CliError> {
                    let tick = t
                        .parse::<u64>()
                        .map_err(|_| CliError::Usage(format!("bad tick {t}")))?;
                    self.net.timeline().at(tick).ok_or(CliError::NoSnapshot(tick))
                };
                (at(t1)?, at(t2)?)
            }
            _ => return usage("diff [<t1> <t2>]"),
        };
        Ok(self.change_lines(&sim::diff(a, b)))
    }

    fn node_set(&self, names: &[&str]) -> Result<BTreeSet<NodeId>, CliError> {
        names.iter().map(|n| self.resolve(n)).collect()
    }

    fn collapse_obj(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        const USAGE: &str = "collapse-obj <nodes...> as <name>";
        let Some(pos) = args.iter().position(|w| *w == "as") else { return usage(USAGE) };
        let [_, name] = args[pos..] else { return usage(USAGE) };
        let inside = self.node_set(&args[..pos])?;
        let id = reasoning::collapse_to_object(&mut self.net, &inside)?;
        let name = unquote(name)?;
        self.lexicon.set_label(id, self.lang.clone(), name.clone());
        Ok(vec![format!("{name} #{id}")])
    }

    fn collapse_act(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        const USAGE: &str = "collapse-act <nodes...> [--subject S] [--target T] [as <name>]";
        let mut names = Vec::new();
        let mut choice = EndpointChoice::default();
        let mut label = None;
        let mut it = args.iter();
        while let Some(&w) = it.next() {
            match w {
                "--subject" => choice.subject = Some(self.resolve(it.next().ok_or(CliError::Usage(USAGE.into()))?)?),
                "--target" => choice.target = Some(self.resolve(it.next().ok_or(CliError::Usage(USAGE.into()))?)?),
                "as" => label = Some(unquote(it.next().ok_or(CliError::Usage(USAGE.into()))?)?),
                _ => names.push(w),
            }
        }
        let inside = self.node_set(&names)?;
        let id = reasoning::collapse_to_action(&mut self.net, &inside, choice)?;
        Ok(vec![match label {
            Some(name) => {
                self.lexicon.set_label(id, self.lang.clone(), name.clone());
                format!("{name} #{id}")
            }
            None => format!("#{id}"),
        }])
    }

    /// Labels of the collapsed nodes follow them to their new ids.
    fn expand(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let [name] = args else { return usage("expand <node>") };
        let id = self.resolve(name)?;
        let expansion = reasoning::expand(&mut self.net, id)?;
        let moved: Vec<(NodeId, NodeId)> = expansion.renamed.iter().map(|(&o, &n)| (o, n)).collect();
        for (old, new) in moved {
            let labels: Vec<(LangTag, String)> = self
                .lexicon
                .labels()
                .filter(|(n, _, _)| *n == old)
                .map(|(_, l, t)| (l.clone(), t.to_string()))
                .collect();
            self.lexicon.forget(old);
            for (lang, text) in labels {
                self.lexicon.set_label(new, lang, text);
            }
        }
        if !self.net.contains(id) {
            self.lexicon.forget(id);
        }
        Ok(vec![format!("{} nodes restored", expansion.nodes.len())])
    }

    fn mine(&mut self, args: &[&str]) -> Result<Vec<String>, CliError> {
        const USAGE: &str = "mine [--min-support N] [--max-nodes K] [<paths...>]";
        let mut config = MineConfig::default();
        let mut paths = Vec::new();
        let mut it = args.iter();
        let number = |w: Option<&&str>| -> Result<usize, CliError> {
            w.and_then(|w| w.parse().ok()).ok_or(CliError::Usage(USAGE.into()))
        };
        while let Some(&w) = it.next() {
            match w {
                "--min-support" => config.min_support = number(it.next())?,
                "--max-nodes" => config.max_pattern_nodes = number(it.next())?,
                _ if w.starts_with("--") => return usage(USAGE),
                _ => paths.push(self.path(w)?),
            }
        }
        let nets = if paths.is_empty() {
            vec![self.net.clone()]
        } else {
            paths
                .iter()
                .map(|p| read_net(p))
                .collect::<Result<Vec<_>, _>>()?
        };
        let templates = reasoning::mine_concepts(&nets, config)?;
        let mut out = vec![match templates.len() {
            1 => "1 template".to_string(),
            n => format!("{n} templates"),
        }];
        for t in &templates {
            out.push(format!("support {}: {}", t.support, t.pattern));
        }
        Ok(out)
    }

    fn say(&self, args: &[&str]) -> Result<Vec<String>, CliError> {
        let (node, lang) = match args {
            [node] => (node, self.lang.clone()),
            [node, "--lang", l] => (node, LangTag::new(l)?),
            _ => return usage("say <node> [--lang L]"),
        };
        let id = self.resolve(node)?;
        let (text, used) = self.lexicon.label_of(id, &lang)?;
        Ok(vec![if *used == lang {
            text.to_string()
        } else {
            format!("{text} ({used})")
        }])
    }

    /// `<node>.<test>`, `<node> <fragment>` or `@<id> <fragment>`.
    fn condition(&self, text: &str) -> Result<Condition, CliError> {
        if text.starts_with('@') {
            return Ok(Condition::parse(text)?);
        }
        let w = words(text);
        let Some(first) = w.first() else {
            return usage("goal <node>.<test> | goal <node> <fragment>");
        };
        if let Some((node, test)) = first.split_once('.') {
            let anchor = self.resolve(node)?;
            let rest = rest_after(text, 1);
            let fragment = Fragment::parse(&format!(".{test} {rest}"))?;
            return Ok(Condition::new(anchor, fragment));
        }
        let anchor = self.resolve(first)?;
        Ok(Condition::new(anchor, Fragment::parse(rest_after(text, 1))?))
    }
}

fn usage<T>(text: &str) -> Result<T, CliError> {
    Err(CliError::Usage(text.to_string()))
}

/// Reads a whole `.krn` file.
pub fn read_net(path: &Path) -> Result<Net, CliError> {
    Ok(StoreHandle::open(path)?.load_full()?.0)
}
