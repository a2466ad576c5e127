//! Pattern fragments: small structural questions asked about one node.
//!
//! ```text
//! fragment := clause { "&" clause }
//! clause   := "." test
//!           | step { step } [ test ]
//!           | test
//! step     := ("->" | "<-") [ "[" names "]" ] [ "{" names "}" ]
//! test     := ident [ cmp literal ]
//! names    := ident { "," ident }
//! cmp      := "==" | "!=" | "<" | ">" | "<=" | ">="
//! literal  := number | string | "true" | "false" | ident
//! ```
//!
//! `->` follows an action the current node initiates to its target, `<-` an
//! action the node receives back to its subject; `[..]` and `{..}` name
//! properties the action and the reached node must carry. A bare test with
//! no steps looks at the node itself and at everything it reaches through
//! chains of outgoing actions (its parts); a leading `.` restricts the test
//! to the node itself. A bare word literal is text.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::net::{Net, NodeId, PropertyName, Provenance, Value};
use crate::script::values_equal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fragment offset {offset}: expected {expected}")]
pub struct FragmentError {
    pub offset: usize,
    pub expected: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        }
    }

    /// `None` when the values cannot be ordered.
    pub fn holds(self, a: &Value, b: &Value) -> Option<bool> {
        match self {
            Comparator::Eq => Some(values_equal(a, b)),
            Comparator::Ne => Some(!values_equal(a, b)),
            _ => {
                let ord = match (a, b) {
                    (Value::Number(x), Value::Number(y)) => x.partial_cmp(y)?,
                    (Value::Text(x), Value::Text(y)) => x.cmp(y),
                    _ => return None,
                };
                Some(match self {
                    Comparator::Lt => ord.is_lt(),
                    Comparator::Gt => ord.is_gt(),
                    Comparator::Le => ord.is_le(),
                    _ => ord.is_ge(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub direction: Direction,
    pub action_names: BTreeSet<PropertyName>,
    pub node_names: BTreeSet<PropertyName>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Test {
    pub name: PropertyName,
    pub compare: Option<(Comparator, Value)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    /// Test only the anchor node, not its parts.
    pub anchored: bool,
    pub steps: Vec<Step>,
    pub test: Option<Test>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub clauses: Vec<Clause>,
}

/// Three-valued outcome of evaluating a fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Out,
    In,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Amp,
    Cmp(Comparator),
    Word(String),
    Num(f64),
    Str(String),
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, FragmentError> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |offset, expected: &str| FragmentError {
        offset,
        expected: expected.to_string(),
    };
    while i < b.len() {
        let c = b[i];
        let start = i;
        let two = src.get(i..i + 2).unwrap_or("");
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            _ if two == "->" => {
                i += 2;
                Tok::Out
            }
            _ if two == "<-" => {
                i += 2;
                Tok::In
            }
            _ if ["==", "!=", "<=", ">="].contains(&two) => {
                i += 2;
                Tok::Cmp(match two {
                    "==" => Comparator::Eq,
                    "!=" => Comparator::Ne,
                    "<=" => Comparator::Le,
                    _ => Comparator::Ge,
                })
            }
            b'<' | b'>' => {
                i += 1;
                Tok::Cmp(if c == b'<' { Comparator::Lt } else { Comparator::Gt })
            }
            b'[' | b']' | b'{' | b'}' | b',' | b'.' | b'&' => {
                i += 1;
                match c {
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b',' => Tok::Comma,
                    b'.' => Tok::Dot,
                    _ => Tok::Amp,
                }
            }
            b'"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    let Some(ch) = src[i..].chars().next() else {
                        return Err(err(i, "closing quote"));
                    };
                    i += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let esc = src[i..].chars().next().ok_or_else(|| err(i, "escape"))?;
                            i += esc.len_utf8();
                            s.push(match esc {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                '\\' => '\\',
                                '"' => '"',
                                _ => return Err(err(i - 1, "escape")),
                            });
                        }
                        ch => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            b'-' | b'0'..=b'9' => {
                i += 1;
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.' || b[i] == b'e' || b[i] == b'E') {
                    i += 1;
                }
                let n: f64 = src[start..i].parse().map_err(|_| err(start, "number"))?;
                Tok::Num(n)
            }
            b'a'..=b'z' => {
                while i < b.len()
                    && (b[i].is_ascii_lowercase() || b[i].is_ascii_digit() || b[i] == b'_' || b[i] == b'-')
                {
                    // Stop before an arrow glued to a word: `x->y`.
                    if b[i] == b'-' && b.get(i + 1) == Some(&b'>') {
                        break;
                    }
                    i += 1;
                }
                Tok::Word(src[start..i].to_string())
            }
            _ => return Err(err(start, "a fragment token")),
        };
        out.push((start, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, FragmentError> {
        Err(FragmentError {
            offset: self.toks[self.pos].0,
            expected: expected.to_string(),
        })
    }

    fn name(&mut self) -> Result<PropertyName, FragmentError> {
        match self.peek().clone() {
            Tok::Word(w) => match PropertyName::new(&w) {
                Ok(n) => {
                    self.bump();
                    Ok(n)
                }
                Err(_) => self.fail("a property name"),
            },
            _ => self.fail("a property name"),
        }
    }

    fn names(&mut self, close: Tok) -> Result<BTreeSet<PropertyName>, FragmentError> {
        let mut out = BTreeSet::new();
        if *self.peek() == close {
            self.bump();
            return Ok(out);
        }
        loop {
            out.insert(self.name()?);
            match self.bump() {
                Tok::Comma => continue,
                t if t == close => return Ok(out),
                _ => {
                    self.pos -= 1;
                    return self.fail("`,` or a closing bracket");
                }
            }
        }
    }

    fn test(&mut self) -> Result<Test, FragmentError> {
        let name = self.name()?;
        let compare = if let Tok::Cmp(c) = *self.peek() {
            self.bump();
            let v = match self.peek().clone() {
                Tok::Num(n) => Value::Number(n),
                Tok::Str(s) => Value::Text(s),
                Tok::Word(w) if w == "true" || w == "false" => Value::Truth(w == "true"),
                Tok::Word(w) => Value::Text(w),
                _ => return self.fail("a literal"),
            };
            self.bump();
            Some((c, v))
        } else {
            None
        };
        Ok(Test { name, compare })
    }

    fn clause(&mut self) -> Result<Clause, FragmentError> {
        if *self.peek() == Tok::Dot {
            self.bump();
            return Ok(Clause {
                anchored: true,
                steps: Vec::new(),
                test: Some(self.test()?),
            });
        }
        let mut steps = Vec::new();
        while matches!(self.peek(), Tok::Out | Tok::In) {
            let direction = if self.bump() == Tok::Out { Direction::Out } else { Direction::In };
            let mut step = Step {
                direction,
                action_names: BTreeSet::new(),
                node_names: BTreeSet::new(),
            };
            if *self.peek() == Tok::LBracket {
                self.bump();
                step.action_names = self.names(Tok::RBracket)?;
            }
            if *self.peek() == Tok::LBrace {
                self.bump();
                step.node_names = self.names(Tok::RBrace)?;
            }
            steps.push(step);
        }
        let test = match self.peek() {
            Tok::Word(_) => Some(self.test()?),
            _ if steps.is_empty() => return self.fail("a property name, `.`, `->` or `<-`"),
            _ => None,
        };
        Ok(Clause {
            anchored: false,
            steps,
            test,
        })
    }
}

impl Fragment {
    pub fn parse(src: &str) -> Result<Fragment, FragmentError> {
        let mut p = Parser {
            toks: lex(src)?,
            pos: 0,
        };
        let mut clauses = vec![p.clause()?];
        while *p.peek() == Tok::Amp {
            p.bump();
            clauses.push(p.clause()?);
        }
        if *p.peek() != Tok::End {
            return p.fail("`&` or end of fragment");
        }
        Ok(Fragment { clauses })
    }

    /// Every property name the fragment tests or requires.
    pub fn names(&self) -> BTreeSet<PropertyName> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            for s in &c.steps {
                out.extend(s.action_names.iter().cloned());
                out.extend(s.node_names.iter().cloned());
            }
            if let Some(t) = &c.test {
                out.insert(t.name.clone());
            }
        }
        out
    }

    /// Evaluates against `anchor`. With `allow_inferred` false, nodes and
    /// properties produced by shaping are invisible.
    pub fn evaluate(&self, net: &Net, anchor: NodeId, allow_inferred: bool) -> Truth {
        if !net.contains(anchor) {
            return Truth::Unknown;
        }
        self.clauses
            .iter()
            .map(|c| c.evaluate(net, anchor, allow_inferred))
            .fold(Truth::True, Truth::and)
    }
}

fn visible(net: &Net, id: NodeId, allow_inferred: bool) -> bool {
    allow_inferred || net.origin_of(id) != Some(Provenance::Inferred)
}

fn carries(net: &Net, id: NodeId, names: &BTreeSet<PropertyName>) -> bool {
    net.properties(id)
        .map(|p| names.iter().all(|n| p.contains_key(n.as_str())))
        .unwrap_or(false)
}

impl Clause {
    fn ends(&self, net: &Net, anchor: NodeId, allow_inferred: bool) -> BTreeSet<NodeId> {
        let mut frontier = BTreeSet::from([anchor]);
        if self.steps.is_empty() && !self.anchored {
            let mut queue = VecDeque::from([anchor]);
            while let Some(n) = queue.pop_front() {
                let Some(o) = net.object(n) else { continue };
                for &a in o.outgoing() {
                    let t = net.action(a).expect("live").target();
                    if visible(net, a, allow_inferred) && visible(net, t, allow_inferred) && frontier.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
            return frontier;
        }
        for step in &self.steps {
            let mut next = BTreeSet::new();
            for &n in &frontier {
                let Some(o) = net.object(n) else { continue };
                let list = match step.direction {
                    Direction::Out => o.outgoing(),
                    Direction::In => o.incoming(),
                };
                for &a in list {
                    let rec = net.action(a).expect("live");
                    let far = match step.direction {
                        Direction::Out => Some(rec.target()),
                        Direction::In => rec.subject(),
                    };
                    let Some(far) = far else { continue };
                    if visible(net, a, allow_inferred)
                        && visible(net, far, allow_inferred)
                        && carries(net, a, &step.action_names)
                        && carries(net, far, &step.node_names)
                    {
                        next.insert(far);
                    }
                }
            }
            frontier = next;
        }
        frontier
    }

    fn evaluate(&self, net: &Net, anchor: NodeId, allow_inferred: bool) -> Truth {
        let ends = self.ends(net, anchor, allow_inferred);
        let Some(test) = &self.test else {
            return if ends.is_empty() { Truth::False } else { Truth::True };
        };
        let mut unknown = false;
        let mut present = false;
        for &n in &ends {
            let Ok(rec) = net.property(n, test.name.as_str()) else { continue };
            if !allow_inferred && rec.provenance() == Provenance::Inferred {
                continue;
            }
            present = true;
            let Some((cmp, lit)) = &test.compare else {
                return Truth::True;
            };
            match rec.value() {
                None | Some(Value::Unset) => unknown = true,
                Some(v) => {
                    if cmp.holds(v, lit) == Some(true) {
                        return Truth::True;
                    }
                }
            }
        }
        match (&test.compare, present, unknown) {
            (None, _, _) => Truth::False,
            (Some(_), false, _) | (Some(_), _, true) => Truth::Unknown,
            _ => Truth::False,
        }
    }
}

fn write_names(f: &mut fmt::Formatter<'_>, open: char, close: char, names: &BTreeSet<PropertyName>) -> fmt::Result {
    let joined: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
    write!(f, "{open}{}{close}", joined.join(","))
}

fn write_literal(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Text(s) => f.write_str(&crate::text::quote(s)),
        other => write!(f, "{other}"),
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.anchored {
            f.write_str(".")?;
        }
        for (k, s) in self.steps.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str(match s.direction {
                Direction::Out => "->",
                Direction::In => "<-",
            })?;
            if !s.action_names.is_empty() {
                write_names(f, '[', ']', &s.action_names)?;
            }
            if !s.node_names.is_empty() {
                write_names(f, '{', '}', &s.node_names)?;
            }
        }
        if let Some(t) = &self.test {
            if !self.steps.is_empty() {
                f.write_str(" ")?;
            }
            write!(f, "{}", t.name)?;
            if let Some((c, v)) = &t.compare {
                write!(f, " {} ", c.symbol())?;
                write_literal(f, v)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.clauses.iter().enumerate() {
            if k > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
