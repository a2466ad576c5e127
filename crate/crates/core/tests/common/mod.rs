//! Independent oracles shared by the integration tests. Nothing here uses
//! the crate's own matching, canonical forms or evaluator.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use krnet::lexicon::{LangTag, Lexicon};
use krnet::net::{Net, NodeId, NodeKind, PropertyName, Provenance, SensorAddress, SensorSignal, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn no_props() -> Vec<(&'static str, Value)> {
    Vec::new()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

// ---------------------------------------------------------------- symmetry

/// Referential symmetry, checked from both sides, plus sorted unique lists.
pub fn symmetry_violations(net: &Net) -> Vec<String> {
    let mut out = Vec::new();
    for a in net.actions() {
        if let Some(s) = a.subject() {
            match net.object(s) {
                Some(o) if o.outgoing().contains(&a.id()) => {}
                _ => out.push(format!("action {} missing from subject {s} outgoing", a.id())),
            }
        }
        match net.object(a.target()) {
            Some(o) if o.incoming().contains(&a.id()) => {}
            _ => out.push(format!("action {} missing from target {} incoming", a.id(), a.target())),
        }
    }
    for o in net.objects() {
        for (list, is_out) in [(o.outgoing(), true), (o.incoming(), false)] {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                out.push(format!("object {} list not sorted/unique", o.id()));
            }
            for &a in list {
                match net.action(a) {
                    Some(r) if is_out && r.subject() == Some(o.id()) => {}
                    Some(r) if !is_out && r.target() == o.id() => {}
                    _ => out.push(format!("object {} lists stale action {a}", o.id())),
                }
            }
        }
    }
    for (i, c) in net.isa_edges() {
        if net.object(i).is_none() || net.object(c).is_none() {
            out.push(format!("isa edge {i}->{c} dangles"));
        }
    }
    out
}

// ---------------------------------------------------------------- random nets

const NAMES: [&str; 8] = ["colour", "size", "position", "open", "hand", "leg", "owner", "mood"];
const TEXTS: [&str; 6] = ["green", "black", "two words", "quote \" and \\ slash", "line\nbreak\ttab", "ünïcødé ✓"];
const SCRIPTS: [&str; 5] = [
    "set object.colour = \"black\";",
    "set subject.position = subject.position + 1;",
    "if object.size > 2 { set object.size = object.size - 1; } else { unset object.mood; }",
    "# a comment\nset object.open = not object.open;\n",
    "",
];

pub fn random_value(rng: &mut ChaCha8Rng, existing: &[NodeId], tick: u64) -> Value {
    match rng.gen_range(0..7) {
        0 => Value::Number(rng.gen_range(-1000..1000) as f64 / 8.0),
        1 => Value::Number(rng.gen::<f64>() * 1e6),
        2 => Value::text(*TEXTS.choose(rng).unwrap()),
        3 => Value::Truth(rng.gen()),
        4 if !existing.is_empty() => Value::Ref(*existing.choose(rng).unwrap()),
        5 => {
            let len = rng.gen_range(0..6);
            let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let origin = SensorAddress::new(["eye", ["left", "right"][rng.gen_range(0..2)]]).unwrap();
            Value::Signal(SensorSignal::new(origin, payload, tick))
        }
        _ => Value::Unset,
    }
}

pub struct NetSpec {
    pub objects: usize,
    pub actions: usize,
    /// Scripts, sensed and inferred properties, is-a edges and labels.
    pub extras: bool,
}

/// A random net built only through the public API, with its lexicon.
pub fn random_net(rng: &mut ChaCha8Rng, spec: &NetSpec) -> (Net, Lexicon) {
    let mut net = Net::new();
    let mut lex = Lexicon::new();
    let mut objects = Vec::new();
    for _ in 0..spec.objects.max(1) {
        let mut props = BTreeMap::new();
        for _ in 0..rng.gen_range(0..4) {
            let name = *NAMES.choose(rng).unwrap();
            props.insert(name, random_value(rng, &objects, 1));
        }
        objects.push(net.add_object(props).unwrap());
    }
    for _ in 0..spec.actions {
        let subject = if rng.gen_bool(0.2) { None } else { Some(*objects.choose(rng).unwrap()) };
        let target = *objects.choose(rng).unwrap();
        let script = (spec.extras && rng.gen_bool(0.5)).then(|| *SCRIPTS.choose(rng).unwrap());
        let mut props = BTreeMap::new();
        if rng.gen_bool(0.5) {
            props.insert(*NAMES.choose(rng).unwrap(), random_value(rng, &objects, 1));
        }
        net.add_action(subject, target, script, props).unwrap();
    }
    if spec.extras {
        for _ in 0..rng.gen_range(0..4) {
            let o = *objects.choose(rng).unwrap();
            let origin = SensorAddress::new(["skin", "p7"]).unwrap();
            let payload: Vec<u8> = (0..rng.gen_range(0..4)).map(|_| rng.gen()).collect();
            let sig = net.capture(origin, payload);
            net.ingest_signal(o, "touch", sig).unwrap();
        }
        for _ in 0..rng.gen_range(0..3) {
            let id = *net.node_ids().choose(rng).unwrap();
            net.set_property(id, "guess", Value::Unset, Provenance::Inferred).unwrap();
        }
        for _ in 0..rng.gen_range(0..3) {
            let i = *objects.choose(rng).unwrap();
            let c = *objects.choose(rng).unwrap();
            net.add_isa(i, c).unwrap();
        }
        let ids = net.node_ids();
        for _ in 0..rng.gen_range(0..5) {
            let id = *ids.choose(rng).unwrap();
            let lang = LangTag::new(["en", "fr", "de-CH"][rng.gen_range(0..3)]).unwrap();
            lex.set_label(id, lang, *TEXTS.choose(rng).unwrap());
        }
    }
    (net, lex)
}

// ---------------------------------------------------------------- isomorphism

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Compare {
    /// Property names, values and provenance, node origin and scripts.
    Full,
    /// Node kinds, property names and link shape only.
    Shape,
}

fn signature(net: &Net, id: NodeId, how: Compare) -> String {
    let props = net.properties(id).unwrap();
    let mut s = format!("{:?}|", net.kind_of(id).unwrap());
    for (name, rec) in props {
        if how == Compare::Shape {
            if name.is_reserved() {
                continue;
            }
            s.push_str(&format!("{name};"));
        } else {
            s.push_str(&format!("{name}={:?}/{:?};", rec.value(), rec.provenance()));
        }
    }
    if how == Compare::Full {
        s.push_str(&format!("|{:?}", net.origin_of(id)));
        if let Some(a) = net.action(id) {
            s.push_str(&format!("|{:?}", a.script().source()));
        }
    }
    if let Some(o) = net.object(id) {
        s.push_str(&format!("|{}/{}", o.outgoing().len(), o.incoming().len()));
    } else if let Some(a) = net.action(id) {
        s.push_str(&format!("|{}", a.subject().is_some()));
    }
    s
}

/// Brute-force isomorphism: a bijection between the objects of `a` and `b`
/// under which actions, their endpoints and is-a edges correspond.
pub fn isomorphic(a: &Net, b: &Net, how: Compare) -> bool {
    if a.object_count() != b.object_count() || a.action_count() != b.action_count() {
        return false;
    }
    let ao: Vec<NodeId> = a.objects().map(|o| o.id()).collect();
    let bo: Vec<NodeId> = b.objects().map(|o| o.id()).collect();
    let asig: HashMap<NodeId, String> = a.node_ids().into_iter().map(|n| (n, signature(a, n, how))).collect();
    let bsig: HashMap<NodeId, String> = b.node_ids().into_iter().map(|n| (n, signature(b, n, how))).collect();
    let mut ms: Vec<&String> = asig.values().collect();
    let mut ns: Vec<&String> = bsig.values().collect();
    ms.sort();
    ns.sort();
    if ms != ns {
        return false;
    }
    let mut map: HashMap<NodeId, NodeId> = HashMap::new();
    let mut used = BTreeSet::new();
    assign(a, b, &ao, &bo, 0, &asig, &bsig, &mut map, &mut used, how)
}

#[allow(clippy::too_many_arguments)]
fn assign(
    a: &Net,
    b: &Net,
    ao: &[NodeId],
    bo: &[NodeId],
    k: usize,
    asig: &HashMap<NodeId, String>,
    bsig: &HashMap<NodeId, String>,
    map: &mut HashMap<NodeId, NodeId>,
    used: &mut BTreeSet<NodeId>,
    how: Compare,
) -> bool {
    if k == ao.len() {
        return actions_correspond(a, b, map, asig, bsig) && isa_corresponds(a, b, map, how);
    }
    let x = ao[k];
    for &y in bo {
        if used.contains(&y) || asig[&x] != bsig[&y] {
            continue;
        }
        // Early check: actions between already mapped objects must agree in count.
        map.insert(x, y);
        used.insert(y);
        if partial_ok(a, b, map, x, asig, bsig) && assign(a, b, ao, bo, k + 1, asig, bsig, map, used, how) {
            return true;
        }
        map.remove(&x);
        used.remove(&y);
    }
    false
}

type Edge = (Option<NodeId>, NodeId, String);

fn action_edges(net: &Net, sig: &HashMap<NodeId, String>, filter: &dyn Fn(&Edge) -> bool) -> Vec<Edge> {
    let mut v: Vec<Edge> = net
        .actions()
        .map(|r| (r.subject(), r.target(), sig[&r.id()].clone()))
        .filter(|e| filter(e))
        .collect();
    v.sort();
    v
}

fn partial_ok(
    a: &Net,
    b: &Net,
    map: &HashMap<NodeId, NodeId>,
    x: NodeId,
    asig: &HashMap<NodeId, String>,
    bsig: &HashMap<NodeId, String>,
) -> bool {
    let touches = |e: &Edge, n: NodeId| e.0 == Some(n) || e.1 == n;
    let mapped = |e: &Edge| e.0.is_none_or(|s| map.contains_key(&s)) && map.contains_key(&e.1);
    let mut left: Vec<Edge> = action_edges(a, asig, &|e| touches(e, x) && mapped(e))
        .into_iter()
        .map(|(s, t, g)| (s.map(|s| map[&s]), map[&t], g))
        .collect();
    left.sort();
    let y = map[&x];
    let image: BTreeSet<NodeId> = map.values().copied().collect();
    let right = action_edges(b, bsig, &|e| {
        touches(e, y) && e.0.is_none_or(|s| image.contains(&s)) && image.contains(&e.1)
    });
    left == right
}

fn actions_correspond(
    a: &Net,
    b: &Net,
    map: &HashMap<NodeId, NodeId>,
    asig: &HashMap<NodeId, String>,
    bsig: &HashMap<NodeId, String>,
) -> bool {
    let mut left: Vec<Edge> = action_edges(a, asig, &|_| true)
        .into_iter()
        .map(|(s, t, g)| (s.map(|s| map[&s]), map[&t], g))
        .collect();
    left.sort();
    left == action_edges(b, bsig, &|_| true)
}

fn isa_corresponds(a: &Net, b: &Net, map: &HashMap<NodeId, NodeId>, how: Compare) -> bool {
    if how == Compare::Shape {
        return true;
    }
    let left: BTreeSet<(NodeId, NodeId)> = a.isa_edges().map(|(i, c)| (map[&i], map[&c])).collect();
    let right: BTreeSet<(NodeId, NodeId)> = b.isa_edges().collect();
    left == right
}

// ---------------------------------------------------------------- brute-force mining

/// A copy of `net` holding only `keep`, which must be action-closed.
pub fn restrict(net: &Net, keep: &BTreeSet<NodeId>) -> Net {
    let mut out = net.clone();
    for id in net.node_ids() {
        if !keep.contains(&id) && out.contains(id) {
            out.erase_node(id).unwrap();
        }
    }
    out
}

pub fn connected(net: &Net, set: &BTreeSet<NodeId>) -> bool {
    let Some(&start) = set.iter().next() else { return false };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        let mut next: Vec<NodeId> = Vec::new();
        if let Some(a) = net.action(n) {
            next.extend(a.subject());
            next.push(a.target());
        }
        if let Some(o) = net.object(n) {
            next.extend(o.outgoing());
            next.extend(o.incoming());
        }
        for m in next {
            if set.contains(&m) && seen.insert(m) {
                stack.push(m);
            }
        }
    }
    seen.len() == set.len()
}

pub fn action_closed(net: &Net, set: &BTreeSet<NodeId>) -> bool {
    set.iter().all(|&id| match net.action(id) {
        Some(a) => set.contains(&a.target()) && a.subject().is_none_or(|s| set.contains(&s)),
        None => true,
    })
}

/// All connected, action-closed node subsets with at most `max` nodes, by
/// exhaustive bitmask enumeration.
pub fn closed_subsets(net: &Net, within: &[NodeId], max: usize) -> Vec<BTreeSet<NodeId>> {
    assert!(within.len() <= 16, "brute force is for small nets");
    let mut out = Vec::new();
    for mask in 1u32..(1 << within.len()) {
        if mask.count_ones() as usize > max {
            continue;
        }
        let set: BTreeSet<NodeId> = (0..within.len()).filter(|i| mask & (1 << i) != 0).map(|i| within[i]).collect();
        if action_closed(net, &set) && connected(net, &set) {
            out.push(set);
        }
    }
    out
}

pub struct OracleClass {
    pub net: usize,
    pub witness: BTreeSet<NodeId>,
    pub shape: Net,
    pub support: usize,
}

/// Maximal frequent patterns by exhaustive enumeration and pairwise
/// isomorphism tests. A frequent pattern is maximal when it does not occur
/// inside any larger frequent pattern.
pub fn brute_force_mine(nets: &[Net], min_support: usize, max_nodes: usize) -> Vec<OracleClass> {
    let mut classes: Vec<OracleClass> = Vec::new();
    for (k, net) in nets.iter().enumerate() {
        let ids = net.node_ids();
        for set in closed_subsets(net, &ids, max_nodes) {
            let shape = restrict(net, &set);
            match classes.iter_mut().find(|c| isomorphic(&c.shape, &shape, Compare::Shape)) {
                Some(c) => c.support += 1,
                None => classes.push(OracleClass {
                    net: k,
                    witness: set,
                    shape,
                    support: 1,
                }),
            }
        }
    }
    let frequent: Vec<OracleClass> = classes.into_iter().filter(|c| c.support >= min_support).collect();
    let embeds = |small: &OracleClass, big: &OracleClass| -> bool {
        let within: Vec<NodeId> = big.witness.iter().copied().collect();
        closed_subsets(&nets[big.net], &within, small.witness.len())
            .into_iter()
            .filter(|s| s.len() == small.witness.len())
            .any(|s| isomorphic(&restrict(&nets[big.net], &s), &small.shape, Compare::Shape))
    };
    let mut keep = Vec::new();
    for (i, c) in frequent.iter().enumerate() {
        let dominated = frequent
            .iter()
            .enumerate()
            .any(|(j, d)| j != i && d.witness.len() > c.witness.len() && embeds(c, d));
        if !dominated {
            keep.push(i);
        }
    }
    let mut frequent: Vec<Option<OracleClass>> = frequent.into_iter().map(Some).collect();
    keep.into_iter().map(|i| frequent[i].take().unwrap()).collect()
}

// ---------------------------------------------------------------- reference script evaluator

#[derive(Debug, Clone, PartialEq)]
pub enum RVal {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl RVal {
    pub fn to_value(&self) -> Value {
        match self {
            RVal::Num(n) => Value::Number(*n),
            RVal::Bool(b) => Value::Truth(*b),
            RVal::Text(s) => Value::Text(s.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum RExpr {
    Num(f64),
    Bool(bool),
    Text(String),
    Read(&'static str, &'static str),
    Bin(&'static str, Box<RExpr>, Box<RExpr>),
    Not(Box<RExpr>),
    Neg(Box<RExpr>),
}

impl RExpr {
    /// Fully parenthesized source text.
    pub fn source(&self) -> String {
        match self {
            RExpr::Num(n) => format!("{n}"),
            RExpr::Bool(b) => format!("{b}"),
            RExpr::Text(s) => format!("{s:?}"),
            RExpr::Read(role, name) => format!("{role}.{name}"),
            RExpr::Bin(op, l, r) => format!("({} {op} {})", l.source(), r.source()),
            RExpr::Not(e) => format!("not ({})", e.source()),
            RExpr::Neg(e) => format!("-({})", e.source()),
        }
    }

    /// Straightforward recursive evaluation. `Err` stands for any runtime
    /// error the interpreter must raise.
    pub fn eval(&self, env: &HashMap<(String, String), RVal>) -> Result<RVal, ()> {
        let num = |v: RVal| match v {
            RVal::Num(n) => Ok(n),
            _ => Err(()),
        };
        let boolean = |v: RVal| match v {
            RVal::Bool(b) => Ok(b),
            _ => Err(()),
        };
        let finite = |n: f64| if n.is_finite() { Ok(RVal::Num(n)) } else { Err(()) };
        match self {
            RExpr::Num(n) => Ok(RVal::Num(*n)),
            RExpr::Bool(b) => Ok(RVal::Bool(*b)),
            RExpr::Text(s) => Ok(RVal::Text(s.clone())),
            RExpr::Read(role, name) => env.get(&(role.to_string(), name.to_string())).cloned().ok_or(()),
            RExpr::Not(e) => Ok(RVal::Bool(!boolean(e.eval(env)?)?)),
            RExpr::Neg(e) => finite(-num(e.eval(env)?)?),
            RExpr::Bin(op, l, r) => {
                if *op == "and" || *op == "or" {
                    let lhs = boolean(l.eval(env)?)?;
                    if (*op == "and" && !lhs) || (*op == "or" && lhs) {
                        return Ok(RVal::Bool(lhs));
                    }
                    return Ok(RVal::Bool(boolean(r.eval(env)?)?));
                }
                let lhs = l.eval(env)?;
                let rhs = r.eval(env)?;
                match *op {
                    "==" => Ok(RVal::Bool(lhs == rhs)),
                    "!=" => Ok(RVal::Bool(lhs != rhs)),
                    "+" => match (lhs, rhs) {
                        (RVal::Text(a), RVal::Text(b)) => Ok(RVal::Text(a + &b)),
                        (a, b) => finite(num(a)? + num(b)?),
                    },
                    "-" => finite(num(lhs)? - num(rhs)?),
                    "*" => finite(num(lhs)? * num(rhs)?),
                    "/" => {
                        let d = num(rhs)?;
                        if d == 0.0 {
                            return Err(());
                        }
                        finite(num(lhs)? / d)
                    }
                    "<" => Ok(RVal::Bool(num(lhs)? < num(rhs)?)),
                    ">" => Ok(RVal::Bool(num(lhs)? > num(rhs)?)),
                    "<=" => Ok(RVal::Bool(num(lhs)? <= num(rhs)?)),
                    ">=" => Ok(RVal::Bool(num(lhs)? >= num(rhs)?)),
                    other => panic!("unknown operator {other}"),
                }
            }
        }
    }
}

/// Random well-typed expressions over the numeric properties `object.a`,
/// `object.b`, `subject.c`, the truth `object.p` and the text `object.t`.
pub struct ExprGen<'r> {
    pub rng: &'r mut ChaCha8Rng,
}

impl ExprGen<'_> {
    pub fn num(&mut self, depth: u32) -> RExpr {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..5) {
                0 => RExpr::Read("object", "a"),
                1 => RExpr::Read("object", "b"),
                2 => RExpr::Read("subject", "c"),
                3 => RExpr::Num(self.rng.gen_range(0..20) as f64),
                _ => RExpr::Num(self.rng.gen_range(0..400) as f64 / 16.0),
            };
        }
        match self.rng.gen_range(0..5) {
            0 => RExpr::Neg(Box::new(self.num(depth - 1))),
            k => {
                let op = ["+", "-", "*", "/"][k - 1];
                RExpr::Bin(op, Box::new(self.num(depth - 1)), Box::new(self.num(depth - 1)))
            }
        }
    }

    pub fn text(&mut self, depth: u32) -> RExpr {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return if self.rng.gen_bool(0.5) {
                RExpr::Read("object", "t")
            } else {
                RExpr::Text(["grey", "green", ""][self.rng.gen_range(0..3)].to_string())
            };
        }
        RExpr::Bin("+", Box::new(self.text(depth - 1)), Box::new(self.text(depth - 1)))
    }

    pub fn boolean(&mut self, depth: u32) -> RExpr {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return match self.rng.gen_range(0..3) {
                0 => RExpr::Read("object", "p"),
                _ => RExpr::Bool(self.rng.gen()),
            };
        }
        match self.rng.gen_range(0..6) {
            0 => RExpr::Not(Box::new(self.boolean(depth - 1))),
            1 => {
                let op = ["and", "or"][self.rng.gen_range(0..2)];
                RExpr::Bin(op, Box::new(self.boolean(depth - 1)), Box::new(self.boolean(depth - 1)))
            }
            2 => {
                // Mixed-kind equality is legal and false.
                let op = ["==", "!="][self.rng.gen_range(0..2)];
                let l = self.any(depth - 1);
                let r = self.any(depth - 1);
                RExpr::Bin(op, Box::new(l), Box::new(r))
            }
            _ => {
                let op = ["<", ">", "<=", ">=", "==", "!="][self.rng.gen_range(0..6)];
                RExpr::Bin(op, Box::new(self.num(depth - 1)), Box::new(self.num(depth - 1)))
            }
        }
    }

    pub fn any(&mut self, depth: u32) -> RExpr {
        match self.rng.gen_range(0..3) {
            0 => self.num(depth),
            1 => self.boolean(depth),
            _ => self.text(depth),
        }
    }
}

/// A statement list for the reference executor.
#[derive(Debug, Clone)]
pub enum RStmt {
    Set(&'static str, RExpr),
    If(RExpr, Vec<RStmt>, Vec<RStmt>),
}

pub fn stmts_source(stmts: &[RStmt]) -> String {
    let mut out = String::new();
    for s in stmts {
        match s {
            RStmt::Set(name, e) => out.push_str(&format!("set object.{name} = {};\n", e.source())),
            RStmt::If(c, t, e) => {
                out.push_str(&format!("if {} {{\n{}}}", c.source(), stmts_source(t)));
                if !e.is_empty() {
                    out.push_str(&format!(" else {{\n{}}}", stmts_source(e)));
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Runs statements against `env` in order. Writes go to `object.<name>`.
pub fn run_reference(stmts: &[RStmt], env: &mut HashMap<(String, String), RVal>) -> Result<(), ()> {
    for s in stmts {
        match s {
            RStmt::Set(name, e) => {
                let v = e.eval(env)?;
                env.insert(("object".into(), name.to_string()), v);
            }
            RStmt::If(c, t, e) => match c.eval(env)? {
                RVal::Bool(true) => run_reference(t, env)?,
                RVal::Bool(false) => run_reference(e, env)?,
                _ => return Err(()),
            },
        }
    }
    Ok(())
}

/// Random programs writing numeric results to `r0..r2` and occasionally
/// overwriting inputs, so later reads see earlier writes.
pub fn random_program(rng: &mut ChaCha8Rng, depth: u32) -> Vec<RStmt> {
    let n = rng.gen_range(1..5);
    let mut out = Vec::new();
    for _ in 0..n {
        let target = ["r0", "r1", "r2", "a", "q"][rng.gen_range(0..5)];
        let stmt = if depth > 0 && rng.gen_bool(0.3) {
            let cond = ExprGen { rng }.boolean(2);
            let then = random_program(rng, depth - 1);
            let other = if rng.gen_bool(0.5) { random_program(rng, depth - 1) } else { Vec::new() };
            RStmt::If(cond, then, other)
        } else if target == "a" {
            RStmt::Set(target, ExprGen { rng }.num(3))
        } else {
            RStmt::Set(target, ExprGen { rng }.any(3))
        };
        out.push(stmt);
    }
    out
}

/// An object/subject pair carrying the properties the generators read.
pub fn script_fixture(rng: &mut ChaCha8Rng) -> (Net, NodeId, NodeId, HashMap<(String, String), RVal>) {
    let mut net = Net::new();
    let a = rng.gen_range(-50..50) as f64 / 4.0;
    let b = rng.gen_range(0..3) as f64;
    let c = rng.gen_range(-8..8) as f64;
    let p: bool = rng.gen();
    let t = ["grey", "green"][rng.gen_range(0..2)];
    let subject = net.add_object([("c", Value::Number(c))]).unwrap();
    let object = net
        .add_object([
            ("a", Value::Number(a)),
            ("b", Value::Number(b)),
            ("p", Value::Truth(p)),
            ("t", Value::text(t)),
        ])
        .unwrap();
    let mut env = HashMap::new();
    env.insert(("object".into(), "a".into()), RVal::Num(a));
    env.insert(("object".into(), "b".into()), RVal::Num(b));
    env.insert(("object".into(), "p".into()), RVal::Bool(p));
    env.insert(("object".into(), "t".into()), RVal::Text(t.into()));
    env.insert(("subject".into(), "c".into()), RVal::Num(c));
    (net, subject, object, env)
}

pub fn pn(s: &str) -> PropertyName {
    PropertyName::new(s).unwrap()
}

pub fn kind(net: &Net, id: NodeId) -> NodeKind {
    net.kind_of(id).unwrap()
}
