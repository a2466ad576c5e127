//! Line-oriented `.krn` persistence with an offset index for partial loading.
//!
//! [`save`] writes a whole net plus its labels. [`StoreHandle::open`] scans a
//! file once, remembering where each node record, property record and script
//! block lives, and then loads only what is asked for: node stubs first,
//! single property values or scripts on demand.

mod format;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::net::{
    ActionRecord, Net, NetError, NodeId, NodeKind, ObjectRecord, PropertyName, PropertyRecord,
    Provenance, ScriptRef, Value,
};
use crate::script::{self, Ast, ScriptParseError};

use format::{Line, Rec, Span};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("node {0} is not in the store")]
    UnknownNode(NodeId),
    #[error("node {node} has no stored property {name:?}")]
    UnknownProperty { node: NodeId, name: String },
    #[error("action {0} has no stored script")]
    UnknownScript(NodeId),
    #[error("node {0} must be loaded before it can be hydrated")]
    NotLoaded(NodeId),
    #[error("node {0} still has unhydrated parts")]
    Unhydrated(NodeId),
    #[error("node {node} has unsaved changes to {what}")]
    Dirty { node: NodeId, what: String },
    #[error("cannot store: {0}")]
    Unstorable(String),
    #[error("handle was opened read-only")]
    ReadOnly,
    #[error(transparent)]
    Parse(#[from] ScriptParseError),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HydrationStats {
    pub objects_hydrated: u64,
    pub properties_hydrated: u64,
    pub scripts_hydrated: u64,
    pub bytes_read: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OpenMode {
    #[default]
    Read,
    ReadWrite,
}

/// Where one node's records live in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub kind: NodeKind,
    record: Span,
    origin: Provenance,
    endpoints: (Option<NodeId>, NodeId),
    properties: BTreeMap<PropertyName, (Span, Provenance)>,
    script: Option<Span>,
    nest: Vec<Span>,
}

impl IndexEntry {
    pub fn record_offset(&self) -> u64 {
        self.record.offset
    }

    pub fn property_offset(&self, name: &str) -> Option<u64> {
        self.properties.get(name).map(|(s, _)| s.offset)
    }

    pub fn script_offset(&self) -> Option<u64> {
        self.script.map(|s| s.offset)
    }

    pub fn property_names(&self) -> impl Iterator<Item = &PropertyName> {
        self.properties.keys()
    }

    /// Bytes of every record belonging to this node.
    pub fn total_bytes(&self) -> u64 {
        self.record.len
            + self.properties.values().map(|(s, _)| s.len).sum::<u64>()
            + self.script.map_or(0, |s| s.len)
            + self.nest.iter().map(|s| s.len).sum::<u64>()
    }
}

/// Serializes `net` and the labels and terms of `lexicon` to `path`. The
/// output depends only on their contents.
pub fn save(net: &Net, lexicon: &Lexicon, path: impl AsRef<Path>) -> Result<(), StoreError> {
    std::fs::write(path, render(net, lexicon)?)?;
    Ok(())
}

/// The exact bytes [`save`] would write.
pub fn render(net: &Net, lexicon: &Lexicon) -> Result<String, StoreError> {
    let mut lines = vec![format::HEADER.to_string()];
    lines.extend(format::node_lines(net.objects(), net.actions())?);
    lines.extend(net.isa_edges().map(|(i, c)| format!("ISA {i} {c}")));
    for (node, lang, text) in lexicon.labels() {
        lines.push(format::label_line(node, lang, text));
    }
    for (key, lang, text) in lexicon.terms() {
        lines.push(format::term_line(key, lang, text));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    Ok(out)
}

/// Parses a complete `.krn` text into a net and its lexicon.
pub fn parse_full(src: &str) -> Result<(Net, Lexicon), StoreError> {
    let (lines, complete) = format::split_lines(src);
    check_header(&lines, complete)?;
    let recs = format::parse_records(&lines[1..])?;
    let asm = format::assemble(recs.into_iter().map(|(s, r)| (s.line, r)).collect())?;
    let mut net = Net::new();
    let mut max_id = 0;
    let mut max_tick = 0;
    for (id, rec) in &asm.objects {
        max_id = max_id.max(id.get());
        max_tick = max_tick.max(max_signal_tick(&rec.properties));
    }
    for (id, rec) in &asm.actions {
        max_id = max_id.max(id.get());
        max_tick = max_tick.max(max_signal_tick(&rec.properties));
        let dangling = rec
            .subject()
            .into_iter()
            .chain([rec.target()])
            .find(|e| !asm.objects.contains_key(e));
        if let Some(e) = dangling {
            return Err(StoreError::Format {
                line: 0,
                message: format!("action {id} refers to missing object {e}"),
            });
        }
    }
    net.objects = asm.objects;
    for rec in asm.actions.into_values() {
        net.link_action(rec);
    }
    for &(i, c, line) in &asm.isa {
        net.add_isa(i, c).map_err(|e| StoreError::Format {
            line,
            message: e.to_string(),
        })?;
    }
    let mut lexicon = Lexicon::new();
    for (node, lang, text, line) in asm.labels {
        if !net.contains(node) {
            return Err(StoreError::Format {
                line,
                message: format!("label for unknown node {node}"),
            });
        }
        lexicon.set_label(node, lang, text);
    }
    for (key, lang, text) in asm.terms {
        lexicon.set_term(key, lang, text);
    }
    if max_id > 0 {
        net.reserve_through(NodeId::new(max_id));
    }
    net.advance_clock_to(max_tick);
    Ok((net, lexicon))
}

fn max_signal_tick(props: &crate::net::Properties) -> u64 {
    props
        .values()
        .filter_map(|p| match p.value() {
            Some(Value::Signal(s)) => Some(s.captured_at),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

fn check_header(lines: &[Line<'_>], complete: bool) -> Result<(), StoreError> {
    match lines.first() {
        Some(l) if l.text == format::HEADER => {}
        _ => {
            return Err(StoreError::Format {
                line: 1,
                message: format!("expected header {:?}", format::HEADER),
            })
        }
    }
    if !complete {
        return Err(StoreError::Format {
            line: lines.len(),
            message: "truncated record (missing final newline)".into(),
        });
    }
    Ok(())
}

/// An open `.krn` file with its record index.
#[derive(Debug)]
pub struct StoreHandle {
    path: PathBuf,
    mode: OpenMode,
    file_len: u64,
    index: BTreeMap<NodeId, IndexEntry>,
    isa: Vec<(NodeId, NodeId)>,
    lexicon: Lexicon,
    stats: HydrationStats,
    stubbed: BTreeSet<NodeId>,
    hydrated: BTreeSet<(NodeId, PropertyName)>,
    scripts: BTreeSet<NodeId>,
}

impl StoreHandle {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_with(path, OpenMode::Read)
    }

    /// Reads the whole file once and builds the index. Labels, terms and
    /// is-a edges are small and are kept on the handle; node payloads are not.
    pub fn open_with(path: impl AsRef<Path>, mode: OpenMode) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let bytes = std::fs::read(&path)?;
        let src = String::from_utf8(bytes).map_err(|e| {
            let upto = &e.as_bytes()[..e.utf8_error().valid_up_to()];
            StoreError::Format {
                line: upto.iter().filter(|&&b| b == b'\n').count() + 1,
                message: "invalid UTF-8".into(),
            }
        })?;
        let mut handle = StoreHandle {
            path,
            mode,
            file_len: src.len() as u64,
            index: BTreeMap::new(),
            isa: Vec::new(),
            lexicon: Lexicon::new(),
            stats: HydrationStats {
                bytes_read: src.len() as u64,
                ..HydrationStats::default()
            },
            stubbed: BTreeSet::new(),
            hydrated: BTreeSet::new(),
            scripts: BTreeSet::new(),
        };
        handle.build_index(&src)?;
        Ok(handle)
    }

    fn build_index(&mut self, src: &str) -> Result<(), StoreError> {
        let (lines, complete) = format::split_lines(src);
        check_header(&lines, complete)?;
        let recs = format::parse_records(&lines[1..])?;
        let mut pending = Vec::new();
        let bad = |line: usize, message: String| StoreError::Format { line, message };
        for (span, rec) in &recs {
            let (id, kind, origin, endpoints) = match rec {
                Rec::Obj { id, origin } => (*id, NodeKind::Object, *origin, (None, *id)),
                Rec::Act {
                    id,
                    subject,
                    target,
                    origin,
                } => (*id, NodeKind::Action, *origin, (*subject, *target)),
                _ => {
                    pending.push((*span, rec));
                    continue;
                }
            };
            let entry = IndexEntry {
                kind,
                record: *span,
                origin,
                endpoints,
                properties: BTreeMap::new(),
                script: None,
                nest: Vec::new(),
            };
            if self.index.insert(id, entry).is_some() {
                return Err(bad(span.line, format!("duplicate id {id}")));
            }
        }
        let mut nests: BTreeMap<NodeId, Vec<(usize, String)>> = BTreeMap::new();
        for (span, rec) in pending {
            let line = span.line;
            match rec {
                Rec::Prop {
                    owner,
                    name,
                    record,
                } => {
                    let entry = self
                        .index
                        .get_mut(owner)
                        .ok_or_else(|| bad(line, format!("property on unknown node {owner}")))?;
                    if entry
                        .properties
                        .insert(name.clone(), (span, record.provenance()))
                        .is_some()
                    {
                        return Err(bad(line, format!("duplicate property {name}")));
                    }
                }
                Rec::Script { id, text } => {
                    let entry = self
                        .index
                        .get_mut(id)
                        .filter(|e| e.kind == NodeKind::Action)
                        .ok_or_else(|| bad(line, format!("script for unknown action {id}")))?;
                    if entry.script.replace(span).is_some() {
                        return Err(bad(line, format!("second script for action {id}")));
                    }
                    let _ = text;
                }
                Rec::Isa(i, c) => {
                    for n in [i, c] {
                        if self.index.get(n).map(|e| e.kind) != Some(NodeKind::Object) {
                            return Err(bad(line, format!("is-a edge names non-object {n}")));
                        }
                    }
                    self.isa.push((*i, *c));
                }
                Rec::Label { node, lang, text } => {
                    if !self.index.contains_key(node) {
                        return Err(bad(line, format!("label for unknown node {node}")));
                    }
                    self.lexicon.set_label(*node, lang.clone(), text.clone());
                }
                Rec::Term { key, lang, text } => {
                    self.lexicon.set_term(key.clone(), lang.clone(), text.clone());
                }
                Rec::Cross(_) => return Err(bad(line, "CROSS outside a nested record".into())),
                Rec::Nest { owner, line, text } => {
                    let entry = self
                        .index
                        .get_mut(owner)
                        .ok_or_else(|| bad(*line, format!("nested records for unknown node {owner}")))?;
                    entry.nest.push(span);
                    nests.entry(*owner).or_default().push((*line, text.clone()));
                }
                Rec::Obj { .. } | Rec::Act { .. } => unreachable!("indexed above"),
            }
        }
        for (id, entry) in &self.index {
            if entry.kind == NodeKind::Action {
                let (s, t) = entry.endpoints;
                for e in s.into_iter().chain([t]) {
                    if self.index.get(&e).map(|x| x.kind) != Some(NodeKind::Object) {
                        return Err(bad(
                            entry.record.line,
                            format!("action {id} refers to missing object {e}"),
                        ));
                    }
                }
            }
        }
        // Nested payloads are validated now so later reads cannot fail on them.
        for lines in nests.values() {
            format::parse_payload(lines)?;
        }
        self.isa.sort();
        self.isa.dedup();
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn mode(&self) -> OpenMode {
        self.mode
    }

    pub fn stats(&self) -> HydrationStats {
        self.stats
    }

    pub fn file_len(&self) -> u64 {
        self.file_len
    }

    /// Number of indexed node records.
    pub fn index_len(&self) -> usize {
        self.index.len()
    }

    pub fn entry(&self, id: NodeId) -> Option<&IndexEntry> {
        self.index.get(&id)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.index.keys().copied()
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn isa_edges(&self) -> &[(NodeId, NodeId)] {
        &self.isa
    }

    fn max_id(&self) -> Option<NodeId> {
        self.index.keys().next_back().copied()
    }

    fn read_span(&mut self, span: Span) -> Result<String, StoreError> {
        let mut file = File::open(&self.path)?;
        file.seek(SeekFrom::Start(span.offset))?;
        let mut buf = vec![0; span.len as usize];
        file.read_exact(&mut buf)?;
        self.stats.bytes_read += span.len;
        String::from_utf8(buf).map_err(|_| StoreError::Format {
            line: span.line,
            message: "invalid UTF-8".into(),
        })
    }

    fn read_line(&mut self, span: Span) -> Result<Rec, StoreError> {
        let text = self.read_span(span)?;
        let text = text.strip_suffix('\n').unwrap_or(&text);
        format::parse_line(text, span.line)
    }

    /// Adds node `id` to `net` as a stub: property names and provenance are
    /// known, values and scripts are not. Loading an action also stubs its
    /// endpoint objects so the link lists stay symmetric. Loading a node that
    /// is already present reads nothing.
    pub fn load_stub(&mut self, id: NodeId, net: &mut Net) -> Result<(), StoreError> {
        let entry = self.index.get(&id).cloned().ok_or(StoreError::UnknownNode(id))?;
        if net.contains(id) {
            return Ok(());
        }
        if let Some(max) = self.max_id() {
            net.reserve_through(max);
        }
        // The record line itself is re-read to confirm the index is current.
        match self.read_line(entry.record)? {
            Rec::Obj { id: got, .. } | Rec::Act { id: got, .. } if got == id => {}
            _ => {
                return Err(StoreError::Format {
                    line: entry.record.line,
                    message: "file changed since it was indexed".into(),
                })
            }
        }
        let stubs = entry
            .properties
            .iter()
            .map(|(name, (_, prov))| (name.clone(), PropertyRecord::stub(*prov)))
            .collect();
        let payload = if entry.nest.is_empty() {
            None
        } else {
            let mut lines = Vec::new();
            for span in &entry.nest {
                match self.read_line(*span)? {
                    Rec::Nest { line, text, .. } => lines.push((line, text)),
                    _ => unreachable!("indexed as nested"),
                }
            }
            Some(Box::new(format::parse_payload(&lines)?))
        };
        match entry.kind {
            NodeKind::Object => {
                let mut rec = ObjectRecord::new(id);
                rec.properties = stubs;
                rec.origin = entry.origin;
                rec.collapse = payload;
                net.objects.insert(id, rec);
            }
            NodeKind::Action => {
                let (subject, target) = entry.endpoints;
                for e in subject.into_iter().chain([target]) {
                    self.load_stub(e, net)?;
                }
                let mut rec = ActionRecord::new(id, subject, target);
                rec.properties = stubs;
                rec.origin = entry.origin;
                rec.collapse = payload;
                if let Some(span) = entry.script {
                    rec.script = ScriptRef::Stub {
                        offset: span.offset,
                    };
                }
                net.link_action(rec);
            }
        }
        for &(i, c) in &self.isa {
            if net.kind_of(i) == Some(NodeKind::Object) && net.kind_of(c) == Some(NodeKind::Object) {
                net.add_isa(i, c)?;
            }
        }
        if self.stubbed.insert(id) {
            self.stats.objects_hydrated += 1;
        }
        Ok(())
    }

    /// Loads one property value. Values already present in the net are
    /// returned as they are and nothing is read.
    pub fn hydrate_property(&mut self, id: NodeId, name: &str, net: &mut Net) -> Result<Value, StoreError> {
        let (span, _) = *self
            .index
            .get(&id)
            .ok_or(StoreError::UnknownNode(id))?
            .properties
            .get(name)
            .ok_or_else(|| StoreError::UnknownProperty {
                node: id,
                name: name.to_string(),
            })?;
        if !net.contains(id) {
            return Err(StoreError::NotLoaded(id));
        }
        if let Ok(Some(v)) = net.value(id, name) {
            return Ok(v.clone());
        }
        let Rec::Prop {
            name: key, record, ..
        } = self.read_line(span)?
        else {
            return Err(StoreError::Format {
                line: span.line,
                message: "expected a property record".into(),
            });
        };
        let value = record.value().cloned().expect("parsed records are hydrated");
        net.properties_mut(id)?.insert(key.clone(), record);
        if let Value::Signal(s) = &value {
            net.advance_clock_to(s.captured_at);
        }
        if self.hydrated.insert((id, key)) {
            self.stats.properties_hydrated += 1;
        }
        Ok(value)
    }

    /// Hydrates every property of `id` that is still a stub.
    pub fn hydrate_node(&mut self, id: NodeId, net: &mut Net) -> Result<(), StoreError> {
        let names: Vec<PropertyName> = net
            .properties(id)?
            .iter()
            .filter(|(_, p)| p.value().is_none())
            .map(|(n, _)| n.clone())
            .collect();
        for name in names {
            self.hydrate_property(id, name.as_str(), net)?;
        }
        if net.action(id).is_some_and(|a| a.script().is_stub()) {
            self.hydrate_script(id, net)?;
        }
        Ok(())
    }

    /// Reads, parses and caches the script of action `id`.
    pub fn hydrate_script(&mut self, id: NodeId, net: &mut Net) -> Result<Ast, StoreError> {
        let entry = self.index.get(&id).ok_or(StoreError::UnknownNode(id))?;
        let span = entry.script.ok_or(StoreError::UnknownScript(id))?;
        let action = net.action(id).ok_or(StoreError::NotLoaded(id))?;
        if let ScriptRef::Loaded { ast, .. } = action.script() {
            return Ok(ast.clone());
        }
        let text = self.read_span(span)?;
        let (lines, _) = format::split_lines(&text);
        let source = match format::parse_records(&lines)?.pop() {
            Some((_, Rec::Script { text, .. })) => text,
            _ => {
                return Err(StoreError::Format {
                    line: span.line,
                    message: "expected a script block".into(),
                })
            }
        };
        let ast = script::parse(&source)?;
        net.actions.get_mut(&id).expect("checked above").script = ScriptRef::Loaded {
            source,
            ast: ast.clone(),
        };
        if self.scripts.insert(id) {
            self.stats.scripts_hydrated += 1;
        }
        Ok(ast)
    }

    /// Demotes a loaded node back to a stub. Refuses when any loaded value or
    /// script differs from what the file holds.
    pub fn evict(&mut self, id: NodeId, net: &mut Net) -> Result<(), StoreError> {
        let entry = self.index.get(&id).cloned().ok_or(StoreError::UnknownNode(id))?;
        if !net.contains(id) {
            return Err(StoreError::NotLoaded(id));
        }
        let props: Vec<(PropertyName, PropertyRecord)> = net
            .properties(id)?
            .iter()
            .map(|(n, p)| (n.clone(), p.clone()))
            .collect();
        for (name, rec) in &props {
            let Some((span, _)) = entry.properties.get(name) else {
                return Err(StoreError::Dirty {
                    node: id,
                    what: format!("new property {name}"),
                });
            };
            if rec.value().is_some() {
                match self.read_line(*span)? {
                    Rec::Prop { record, .. } if &record == rec => {}
                    _ => {
                        return Err(StoreError::Dirty {
                            node: id,
                            what: format!("property {name}"),
                        })
                    }
                }
            }
        }
        if let Some(name) = entry.properties.keys().find(|n| !props.iter().any(|(p, _)| p == *n)) {
            return Err(StoreError::Dirty {
                node: id,
                what: format!("erased property {name}"),
            });
        }
        let script_offset = match net.action(id).map(|a| a.script().clone()) {
            Some(ScriptRef::Loaded { source, .. }) => {
                let span = entry.script.ok_or_else(|| StoreError::Dirty {
                    node: id,
                    what: "new script".into(),
                })?;
                let text = self.read_span(span)?;
                let (lines, _) = format::split_lines(&text);
                match format::parse_records(&lines)?.pop() {
                    Some((_, Rec::Script { text, .. })) if text == source => Some(span.offset),
                    _ => {
                        return Err(StoreError::Dirty {
                            node: id,
                            what: "script".into(),
                        })
                    }
                }
            }
            Some(ScriptRef::Stub { offset }) => Some(offset),
            _ => None,
        };
        for rec in net.properties_mut(id)?.values_mut() {
            rec.value = None;
        }
        if let (Some(offset), Some(a)) = (script_offset, net.actions.get_mut(&id)) {
            a.script = ScriptRef::Stub { offset };
        }
        Ok(())
    }

    /// Reads and parses the whole file.
    pub fn load_full(&mut self) -> Result<(Net, Lexicon), StoreError> {
        let src = std::fs::read_to_string(&self.path)?;
        self.stats.bytes_read += src.len() as u64;
        parse_full(&src)
    }

    /// Rewrites the file from `net` and `lexicon` and re-indexes it. Only
    /// allowed on handles opened read-write.
    pub fn flush(&mut self, net: &Net, lexicon: &Lexicon) -> Result<(), StoreError> {
        if self.mode != OpenMode::ReadWrite {
            return Err(StoreError::ReadOnly);
        }
        let text = render(net, lexicon)?;
        std::fs::write(&self.path, &text)?;
        self.index.clear();
        self.isa.clear();
        self.lexicon = Lexicon::new();
        self.file_len = text.len() as u64;
        self.build_index(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LangTag;
    use crate::net::{LoadState, PropertyLoad};

    fn en() -> LangTag {
        LangTag::new("en").unwrap()
    }

    fn man_net() -> (Net, Lexicon, NodeId, NodeId) {
        let mut net = Net::new();
        let man = net
            .add_object([
                ("married", Value::Truth(false)),
                ("hand", Value::text("left and right")),
                ("height", Value::Number(180.0)),
            ])
            .unwrap();
        let umbrella = net.add_object([("open", Value::Truth(false))]).unwrap();
        let holds = net
            .add_action(
                Some(man),
                umbrella,
                Some("set object.open = true;"),
                [("speed", Value::Number(2.0))],
            )
            .unwrap();
        let mut lex = Lexicon::new();
        lex.set_label(man, en(), "man");
        lex.set_label(umbrella, en(), "umbrella");
        (net, lex, man, holds)
    }

    #[test]
    fn empty_net_is_header_only() {
        assert_eq!(render(&Net::new(), &Lexicon::new()).unwrap(), "KRN 1\n");
    }

    #[test]
    fn round_trip_and_determinism() {
        let (net, lex, _, _) = man_net();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.krn");
        save(&net, &lex, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        save(&net, &lex, &path).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
        let mut h = StoreHandle::open(&path).unwrap();
        assert_eq!(h.stats().bytes_read, first.len() as u64);
        assert_eq!(h.index_len(), 3);
        let (back, blex) = h.load_full().unwrap();
        assert_eq!(back, net);
        assert_eq!(blex, lex);
    }

    #[test]
    fn lazy_man() {
        let (net, lex, man, holds) = man_net();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.krn");
        save(&net, &lex, &path).unwrap();
        let mut h = StoreHandle::open(&path).unwrap();
        let mut live = Net::new();
        h.load_stub(man, &mut live).unwrap();
        let rec = live.object(man).unwrap();
        assert_eq!(rec.load_state(), LoadState::Stub);
        assert_eq!(rec.property("married").unwrap().load_state(), PropertyLoad::Stub);
        let before = h.stats().bytes_read;
        h.load_stub(man, &mut live).unwrap();
        assert_eq!(h.stats().bytes_read, before);

        let whole = h.entry(man).unwrap().total_bytes();
        let v = h.hydrate_property(man, "hand", &mut live).unwrap();
        assert_eq!(v, Value::text("left and right"));
        assert!(h.stats().bytes_read - before < whole);
        assert_eq!(h.stats().properties_hydrated, 1);
        h.hydrate_property(man, "hand", &mut live).unwrap();
        assert_eq!(h.stats().properties_hydrated, 1);
        assert_eq!(live.property(man, "married").unwrap().load_state(), PropertyLoad::Stub);

        h.load_stub(holds, &mut live).unwrap();
        let a = live.action(holds).unwrap();
        assert!(a.script().is_stub());
        assert_eq!(live.object(man).unwrap().outgoing(), &[holds]);
        assert_eq!(h.stats().scripts_hydrated, 0);
        h.hydrate_script(holds, &mut live).unwrap();
        h.hydrate_script(holds, &mut live).unwrap();
        assert_eq!(h.stats().scripts_hydrated, 1);
        assert!(matches!(h.hydrate_script(man, &mut live), Err(StoreError::UnknownScript(_))));
        assert!(matches!(
            h.hydrate_property(man, "wings", &mut live),
            Err(StoreError::UnknownProperty { .. })
        ));
    }

    #[test]
    fn evict_refuses_dirty() {
        let (net, lex, man, _) = man_net();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.krn");
        save(&net, &lex, &path).unwrap();
        let mut h = StoreHandle::open(&path).unwrap();
        let mut live = Net::new();
        h.load_stub(man, &mut live).unwrap();
        h.hydrate_property(man, "height", &mut live).unwrap();
        h.evict(man, &mut live).unwrap();
        assert_eq!(live.object(man).unwrap().load_state(), LoadState::Stub);
        h.hydrate_property(man, "height", &mut live).unwrap();
        live.set_property(man, "height", Value::Number(181.0), crate::net::Provenance::Asserted).unwrap();
        assert!(matches!(h.evict(man, &mut live), Err(StoreError::Dirty { .. })));
    }

    #[test]
    fn truncation_reports_line() {
        let (net, lex, _, _) = man_net();
        let text = render(&net, &lex).unwrap();
        let cut = &text[..text.len() - 4];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.krn");
        std::fs::write(&path, cut).unwrap();
        match StoreHandle::open(&path) {
            Err(StoreError::Format { line, .. }) => assert_eq!(line, cut.lines().count()),
            other => panic!("{other:?}"),
        }
    }
}
