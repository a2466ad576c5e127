//! Line grammar of `.krn` files, shared by the full loader, the indexer and
//! single-record hydration.

use std::collections::BTreeMap;

use crate::lexicon::LangTag;
use crate::net::{
    ActionRecord, NodeId, ObjectRecord, PropertyName, PropertyRecord, Provenance, ScriptRef,
    SensorAddress, SensorSignal, Value,
};
use crate::reasoning::{CollapsePayload, Crossing, End};
use crate::script;
use crate::text::{escape, quote, unescape};

use super::StoreError;

pub(crate) const HEADER: &str = "KRN 1";
pub(crate) const OPEN: &str = "<<<";
pub(crate) const CLOSE: &str = ">>>";
const INFERRED: &str = "inferred";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Span {
    pub offset: u64,
    pub len: u64,
    pub line: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Line<'a> {
    pub no: usize,
    pub offset: u64,
    pub text: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Rec {
    Obj {
        id: NodeId,
        origin: Provenance,
    },
    Act {
        id: NodeId,
        subject: Option<NodeId>,
        target: NodeId,
        origin: Provenance,
    },
    Prop {
        owner: NodeId,
        name: PropertyName,
        record: PropertyRecord,
    },
    Script {
        id: NodeId,
        text: String,
    },
    Isa(NodeId, NodeId),
    Label {
        node: NodeId,
        lang: LangTag,
        text: String,
    },
    Term {
        key: String,
        lang: LangTag,
        text: String,
    },
    Cross(Crossing),
    Nest {
        owner: NodeId,
        line: usize,
        text: String,
    },
}

/// Splits on `\n` only, keeping byte offsets. A final line without its
/// newline is reported separately so truncation can be detected.
pub(crate) fn split_lines(src: &str) -> (Vec<Line<'_>>, bool) {
    let mut out = Vec::new();
    let mut offset = 0usize;
    let mut no = 1;
    let mut rest = src;
    while let Some(pos) = rest.find('\n') {
        out.push(Line {
            no,
            offset: offset as u64,
            text: &rest[..pos],
        });
        offset += pos + 1;
        rest = &rest[pos + 1..];
        no += 1;
    }
    let complete = rest.is_empty();
    if !complete {
        out.push(Line {
            no,
            offset: offset as u64,
            text: rest,
        });
    }
    (out, complete)
}

fn bad(line: usize, message: impl Into<String>) -> StoreError {
    StoreError::Format {
        line,
        message: message.into(),
    }
}

fn id_token(tok: Option<&str>, line: usize) -> Result<NodeId, StoreError> {
    let tok = tok.ok_or_else(|| bad(line, "missing node id"))?;
    match tok.parse::<u64>() {
        Ok(n) if n > 0 => Ok(NodeId::new(n)),
        _ => Err(bad(line, format!("bad node id {tok:?}"))),
    }
}

fn name_token(tok: Option<&str>, line: usize) -> Result<PropertyName, StoreError> {
    let tok = tok.ok_or_else(|| bad(line, "missing property name"))?;
    PropertyName::new(tok).map_err(|_| bad(line, format!("bad property name {tok:?}")))
}

fn origin_flag(tok: Option<&str>, line: usize) -> Result<Provenance, StoreError> {
    match tok {
        None => Ok(Provenance::Asserted),
        Some(INFERRED) => Ok(Provenance::Inferred),
        Some(other) => Err(bad(line, format!("unexpected {other:?}"))),
    }
}

fn signal_tokens<'a>(
    mut toks: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<SensorSignal, StoreError> {
    let origin = toks.next().ok_or_else(|| bad(line, "missing sensor address"))?;
    let origin = SensorAddress::parse(origin).map_err(|e| bad(line, e.to_string()))?;
    let payload = match toks.next().ok_or_else(|| bad(line, "missing payload"))? {
        "-" => Vec::new(),
        h => hex::decode(h).map_err(|_| bad(line, "bad hex payload"))?,
    };
    let tick = toks
        .next()
        .and_then(|t| t.parse::<u64>().ok())
        .ok_or_else(|| bad(line, "missing tick"))?;
    Ok(SensorSignal::new(origin, payload, tick))
}

fn encode_signal(s: &SensorSignal) -> String {
    let payload = if s.payload.is_empty() {
        "-".to_string()
    } else {
        hex::encode(&s.payload)
    };
    format!("{} {} {}", s.origin, payload, s.captured_at)
}

/// Splits a leading quoted string off `s`, returning it unescaped and the
/// remainder after the closing quote.
fn quoted(s: &str, line: usize) -> Result<(String, &str), StoreError> {
    let body = s.strip_prefix('"').ok_or_else(|| bad(line, "expected a quoted string"))?;
    let mut escaped = false;
    for (i, c) in body.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' => escaped = true,
            '"' => {
                let text = unescape(&body[..i]).ok_or_else(|| bad(line, "bad escape"))?;
                return Ok((text, &body[i + 1..]));
            }
            _ => {}
        }
    }
    Err(bad(line, "unterminated string"))
}

/// Parses one line that is not part of a script block.
pub(crate) fn parse_line(text: &str, line: usize) -> Result<Rec, StoreError> {
    let mut toks = text.split(' ');
    let head = toks.next().unwrap_or("");
    let rec = match head {
        "OBJ" => {
            let id = id_token(toks.next(), line)?;
            Rec::Obj {
                id,
                origin: origin_flag(toks.next(), line)?,
            }
        }
        "ACT" => {
            let id = id_token(toks.next(), line)?;
            let subject = match toks.next() {
                Some("-") => None,
                t => Some(id_token(t, line)?),
            };
            let target = id_token(toks.next(), line)?;
            Rec::Act {
                id,
                subject,
                target,
                origin: origin_flag(toks.next(), line)?,
            }
        }
        "PROP" => {
            let owner = id_token(toks.next(), line)?;
            let name = name_token(toks.next(), line)?;
            let kind = toks.next().ok_or_else(|| bad(line, "missing value kind"))?;
            let (value, mut rest): (Value, Vec<&str>) = match kind {
                "text" => {
                    let start = text.find(" text ").expect("kind token present") + 6;
                    let (s, after) = quoted(&text[start..], line)?;
                    let rest = after.split(' ').filter(|t| !t.is_empty()).collect();
                    (Value::Text(s), rest)
                }
                "num" => {
                    let t = toks.next().ok_or_else(|| bad(line, "missing number"))?;
                    let n = t.parse::<f64>().map_err(|_| bad(line, format!("bad number {t:?}")))?;
                    (Value::Number(n), toks.collect())
                }
                "bool" => match toks.next() {
                    Some("true") => (Value::Truth(true), toks.collect()),
                    Some("false") => (Value::Truth(false), toks.collect()),
                    _ => return Err(bad(line, "bad truth value")),
                },
                "ref" => (Value::Ref(id_token(toks.next(), line)?), toks.collect()),
                "signal" => {
                    let sig = signal_tokens(&mut toks, line)?;
                    (Value::Signal(sig), toks.collect())
                }
                "unset" => match toks.next() {
                    Some("-") => (Value::Unset, toks.collect()),
                    _ => return Err(bad(line, "expected `-` after unset")),
                },
                other => return Err(bad(line, format!("unknown value kind {other:?}"))),
            };
            let provenance = origin_flag(rest.first().copied(), line)?;
            if rest.len() > 1 {
                rest.truncate(1);
                return Err(bad(line, "trailing tokens"));
            }
            Rec::Prop {
                owner,
                name,
                record: PropertyRecord::hydrated(value, provenance),
            }
        }
        "SIG" => {
            let owner = id_token(toks.next(), line)?;
            let name = name_token(toks.next(), line)?;
            let sig = signal_tokens(&mut toks, line)?;
            if toks.next().is_some() {
                return Err(bad(line, "trailing tokens"));
            }
            Rec::Prop {
                owner,
                name,
                record: PropertyRecord::hydrated(Value::Signal(sig), Provenance::Sensed),
            }
        }
        "ISA" => {
            let i = id_token(toks.next(), line)?;
            let c = id_token(toks.next(), line)?;
            Rec::Isa(i, c)
        }
        "LABEL" | "TERM" => {
            let mut parts = text.splitn(4, ' ');
            parts.next();
            let key = parts.next().ok_or_else(|| bad(line, "missing key"))?;
            let lang = parts.next().ok_or_else(|| bad(line, "missing language tag"))?;
            let lang = LangTag::new(lang).map_err(|e| bad(line, e.to_string()))?;
            let body = parts.next().ok_or_else(|| bad(line, "missing label text"))?;
            let text = unescape(body).ok_or_else(|| bad(line, "bad escape"))?;
            if head == "LABEL" {
                Rec::Label {
                    node: id_token(Some(key), line)?,
                    lang,
                    text,
                }
            } else {
                Rec::Term {
                    key: key.to_string(),
                    lang,
                    text,
                }
            }
        }
        "CROSS" => {
            let action = id_token(toks.next(), line)?;
            let end = match toks.next() {
                Some("subject") => End::Subject,
                Some("target") => End::Target,
                _ => return Err(bad(line, "expected subject or target")),
            };
            let object = id_token(toks.next(), line)?;
            Rec::Cross(Crossing { action, end, object })
        }
        "NEST" => {
            let mut parts = text.splitn(3, ' ');
            parts.next();
            let owner = id_token(parts.next(), line)?;
            let inner = parts.next().ok_or_else(|| bad(line, "empty NEST record"))?;
            Rec::Nest {
                owner,
                line,
                text: inner.to_string(),
            }
        }
        "SCRIPT" => return Err(bad(line, "script block outside a record sequence")),
        other => return Err(bad(line, format!("unknown record {other:?}"))),
    };
    Ok(rec)
}

fn skippable(text: &str) -> bool {
    text.trim().is_empty() || text.starts_with('#')
}

/// Parses a sequence of lines, handling script blocks. Each record comes
/// with the span it occupies.
pub(crate) fn parse_records(lines: &[Line<'_>]) -> Result<Vec<(Span, Rec)>, StoreError> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        let l = lines[k];
        if skippable(l.text) {
            k += 1;
            continue;
        }
        if let Some(rest) = l.text.strip_prefix("SCRIPT ") {
            let id = id_token(Some(rest), l.no)?;
            match lines.get(k + 1) {
                Some(open) if open.text == OPEN => {}
                _ => return Err(bad(l.no + 1, "expected <<< after SCRIPT")),
            }
            let mut body = Vec::new();
            let mut j = k + 2;
            loop {
                let Some(inner) = lines.get(j) else {
                    return Err(bad(lines.last().map_or(l.no, |x| x.no), "unterminated script block"));
                };
                if inner.text == CLOSE {
                    break;
                }
                body.push(inner.text);
                j += 1;
            }
            let end = lines[j];
            out.push((
                Span {
                    offset: l.offset,
                    len: end.offset + end.text.len() as u64 + 1 - l.offset,
                    line: l.no,
                },
                Rec::Script {
                    id,
                    text: body.join("\n"),
                },
            ));
            k = j + 1;
            continue;
        }
        out.push((
            Span {
                offset: l.offset,
                len: l.text.len() as u64 + 1,
                line: l.no,
            },
            parse_line(l.text, l.no)?,
        ));
        k += 1;
    }
    Ok(out)
}

/// Records of one nesting level gathered into node records.
#[derive(Debug, Default)]
pub(crate) struct Assembly {
    pub objects: BTreeMap<NodeId, ObjectRecord>,
    pub actions: BTreeMap<NodeId, ActionRecord>,
    pub isa: Vec<(NodeId, NodeId, usize)>,
    pub labels: Vec<(NodeId, LangTag, String, usize)>,
    pub terms: Vec<(String, LangTag, String)>,
    pub crossings: Vec<Crossing>,
}

pub(crate) fn parse_payload(lines: &[(usize, String)]) -> Result<CollapsePayload, StoreError> {
    let views: Vec<Line<'_>> = lines
        .iter()
        .map(|(no, text)| Line {
            no: *no,
            offset: 0,
            text,
        })
        .collect();
    let recs = parse_records(&views)?;
    let asm = assemble(recs.into_iter().map(|(s, r)| (s.line, r)).collect())?;
    let mut payload = CollapsePayload {
        objects: asm.objects.into_values().collect(),
        actions: asm.actions.into_values().collect(),
        isa: asm.isa.iter().map(|&(i, c, _)| (i, c)).collect(),
        crossings: asm.crossings,
    };
    payload.isa.sort();
    payload.crossings.sort();
    Ok(payload)
}

/// Builds node records from parsed records. Link lists are left empty; the
/// caller wires them for top-level nets.
pub(crate) fn assemble(recs: Vec<(usize, Rec)>) -> Result<Assembly, StoreError> {
    let mut asm = Assembly::default();
    let mut nests: BTreeMap<NodeId, Vec<(usize, String)>> = BTreeMap::new();
    let mut rest = Vec::new();
    for (line, rec) in recs {
        match rec {
            Rec::Obj { id, origin } => {
                if asm.objects.contains_key(&id) || asm.actions.contains_key(&id) {
                    return Err(bad(line, format!("duplicate id {id}")));
                }
                let mut o = ObjectRecord::new(id);
                o.origin = origin;
                asm.objects.insert(id, o);
            }
            Rec::Act {
                id,
                subject,
                target,
                origin,
            } => {
                if asm.objects.contains_key(&id) || asm.actions.contains_key(&id) {
                    return Err(bad(line, format!("duplicate id {id}")));
                }
                let mut a = ActionRecord::new(id, subject, target);
                a.origin = origin;
                asm.actions.insert(id, a);
            }
            Rec::Nest { owner, line, text } => nests.entry(owner).or_default().push((line, text)),
            other => rest.push((line, other)),
        }
    }
    for (line, rec) in rest {
        match rec {
            Rec::Prop {
                owner,
                name,
                record,
            } => {
                let props = if let Some(o) = asm.objects.get_mut(&owner) {
                    &mut o.properties
                } else if let Some(a) = asm.actions.get_mut(&owner) {
                    &mut a.properties
                } else {
                    return Err(bad(line, format!("property on unknown node {owner}")));
                };
                if props.insert(name.clone(), record).is_some() {
                    return Err(bad(line, format!("duplicate property {name}")));
                }
            }
            Rec::Script { id, text } => {
                let a = asm
                    .actions
                    .get_mut(&id)
                    .ok_or_else(|| bad(line, format!("script for unknown action {id}")))?;
                let ast = script::parse(&text).map_err(|e| bad(line, format!("script: {e}")))?;
                a.script = ScriptRef::Loaded { source: text, ast };
            }
            Rec::Isa(i, c) => asm.isa.push((i, c, line)),
            Rec::Label { node, lang, text } => asm.labels.push((node, lang, text, line)),
            Rec::Term { key, lang, text } => asm.terms.push((key, lang, text)),
            Rec::Cross(c) => asm.crossings.push(c),
            Rec::Obj { .. } | Rec::Act { .. } | Rec::Nest { .. } => unreachable!("first pass"),
        }
    }
    for (owner, lines) in nests {
        let payload = Box::new(parse_payload(&lines)?);
        let line = lines[0].0;
        if let Some(o) = asm.objects.get_mut(&owner) {
            o.collapse = Some(payload);
        } else if let Some(a) = asm.actions.get_mut(&owner) {
            a.collapse = Some(payload);
        } else {
            return Err(bad(line, format!("nested records for unknown node {owner}")));
        }
    }
    Ok(asm)
}

// ---- writing ----

fn flag(p: Provenance) -> &'static str {
    if p == Provenance::Inferred {
        " inferred"
    } else {
        ""
    }
}

pub(crate) fn prop_line(owner: NodeId, name: &PropertyName, rec: &PropertyRecord) -> Option<String> {
    let value = rec.value()?;
    if rec.provenance() == Provenance::Sensed {
        if let Value::Signal(s) = value {
            return Some(format!("SIG {owner} {name} {}", encode_signal(s)));
        }
    }
    let encoded = match value {
        Value::Number(n) => format!("num {n}"),
        Value::Text(s) => format!("text {}", quote(s)),
        Value::Truth(b) => format!("bool {b}"),
        Value::Ref(r) => format!("ref {r}"),
        Value::Signal(s) => format!("signal {}", encode_signal(s)),
        Value::Unset => "unset -".to_string(),
    };
    Some(format!("PROP {owner} {name} {encoded}{}", flag(rec.provenance())))
}

pub(crate) fn script_lines(id: NodeId, source: &str) -> Result<Vec<String>, StoreError> {
    if source.split('\n').any(|l| l == CLOSE) {
        return Err(StoreError::Unstorable(format!(
            "script of action {id} contains a line reading {CLOSE}"
        )));
    }
    let mut out = vec![format!("SCRIPT {id}"), OPEN.to_string()];
    out.extend(source.split('\n').map(str::to_string));
    out.push(CLOSE.to_string());
    Ok(out)
}

/// Lines for the node records of one level, in id order.
pub(crate) fn node_lines<'a>(
    objects: impl Iterator<Item = &'a ObjectRecord>,
    actions: impl Iterator<Item = &'a ActionRecord>,
) -> Result<Vec<String>, StoreError> {
    enum N<'a> {
        O(&'a ObjectRecord),
        A(&'a ActionRecord),
    }
    let mut nodes: Vec<(NodeId, N<'a>)> = objects
        .map(|o| (o.id(), N::O(o)))
        .chain(actions.map(|a| (a.id(), N::A(a))))
        .collect();
    nodes.sort_by_key(|(id, _)| *id);
    let mut out = Vec::new();
    for (id, node) in nodes {
        let (props, payload) = match node {
            N::O(o) => {
                out.push(format!("OBJ {id}{}", flag(o.origin())));
                (o.properties(), o.collapse_payload())
            }
            N::A(a) => {
                let subject = a.subject().map_or("-".to_string(), |s| s.to_string());
                out.push(format!("ACT {id} {subject} {}{}", a.target(), flag(a.origin())));
                (a.properties(), a.collapse_payload())
            }
        };
        for (name, rec) in props {
            out.push(prop_line(id, name, rec).ok_or(StoreError::Unhydrated(id))?);
        }
        if let N::A(a) = node {
            match a.script() {
                ScriptRef::None => {}
                ScriptRef::Stub { .. } => return Err(StoreError::Unhydrated(id)),
                ScriptRef::Loaded { source, .. } => out.extend(script_lines(id, source)?),
            }
        }
        if let Some(p) = payload {
            for line in payload_lines(p)? {
                out.push(format!("NEST {id} {line}"));
            }
        }
    }
    Ok(out)
}

fn payload_lines(p: &CollapsePayload) -> Result<Vec<String>, StoreError> {
    let mut out = node_lines(p.objects.iter(), p.actions.iter())?;
    let mut isa = p.isa.clone();
    isa.sort();
    out.extend(isa.iter().map(|(i, c)| format!("ISA {i} {c}")));
    let mut crossings = p.crossings.clone();
    crossings.sort();
    out.extend(
        crossings
            .iter()
            .map(|c| format!("CROSS {} {} {}", c.action, c.end.keyword(), c.object)),
    );
    Ok(out)
}

pub(crate) fn label_line(node: NodeId, lang: &LangTag, text: &str) -> String {
    format!("LABEL {node} {lang} {}", escape(text))
}

pub(crate) fn term_line(key: &str, lang: &LangTag, text: &str) -> String {
    format!("TERM {key} {lang} {}", escape(text))
}
