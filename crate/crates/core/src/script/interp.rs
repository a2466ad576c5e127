use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{Ast, BinOp, Expr, LValue, Role, Stmt, UnOp};
use crate::net::{Net, NetError, NodeId, PropertyName, Provenance, Value, ValueKind};

/// Default statement budget for one execution.
pub const DEFAULT_STEP_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("role `{0}` is not bound")]
    UnboundRole(Role),
    #[error("node {node} has no property {name:?}")]
    UnknownProperty { node: NodeId, name: String },
    #[error("property {name:?} on node {node} is not hydrated")]
    Unhydrated { node: NodeId, name: String },
    #[error("type mismatch: `{op}` on {left} and {right}")]
    TypeMismatch {
        op: &'static str,
        left: ValueKind,
        right: ValueKind,
    },
    #[error("type mismatch: expected a truth value, found {0}")]
    NotATruth(ValueKind),
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic produced a non-finite number")]
    NonFinite,
    #[error("step budget of {0} statements exhausted")]
    BudgetExhausted(usize),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// One effective property change. `before`/`after` are `None` when the
/// property was absent.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyChange {
    pub node: NodeId,
    pub name: PropertyName,
    pub before: Option<Value>,
    pub after: Option<Value>,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    change: PropertyChange,
    prior: Option<Provenance>,
}

/// The ordered writes and erasures performed by one execution. Doubles as an
/// undo log: [`ChangeSet::undo`] restores the pre-execution net.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChangeSet {
    entries: Vec<Entry>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn changes(&self) -> impl Iterator<Item = &PropertyChange> + '_ {
        self.entries.iter().map(|e| &e.change)
    }

    pub fn to_vec(&self) -> Vec<PropertyChange> {
        self.changes().cloned().collect()
    }

    /// The net effect per (node, property), ordered by node then name, with
    /// writes that ended where they started dropped.
    pub fn net_effect(&self) -> Vec<PropertyChange> {
        let mut merged: BTreeMap<(NodeId, PropertyName), PropertyChange> = BTreeMap::new();
        for c in self.changes() {
            merged
                .entry((c.node, c.name.clone()))
                .and_modify(|m| m.after = c.after.clone())
                .or_insert_with(|| c.clone());
        }
        merged
            .into_values()
            .filter(|c| c.before != c.after)
            .collect()
    }

    /// Reverts the recorded changes, newest first.
    pub fn undo(&self, net: &mut Net) -> Result<(), NetError> {
        for e in self.entries.iter().rev() {
            let c = &e.change;
            match (&c.before, e.prior) {
                (Some(v), Some(p)) => net.set_property(c.node, c.name.as_str(), v.clone(), p)?,
                _ => net.erase_property(c.node, c.name.as_str())?,
            }
        }
        Ok(())
    }

    fn push(&mut self, change: PropertyChange, prior: Option<Provenance>) {
        self.entries.push(Entry { change, prior });
    }
}

/// Bindings and limits for one execution.
pub struct ExecContext<'a> {
    pub net: &'a mut Net,
    pub subject: Option<NodeId>,
    pub target: NodeId,
    pub self_node: Option<NodeId>,
    pub step_budget: usize,
}

impl<'a> ExecContext<'a> {
    pub fn new(net: &'a mut Net, subject: Option<NodeId>, target: NodeId) -> Self {
        ExecContext {
            net,
            subject,
            target,
            self_node: None,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn with_self(mut self, node: Option<NodeId>) -> Self {
        self.self_node = node;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.step_budget = budget;
        self
    }
}

struct Machine<'a, 'n> {
    ctx: &'a mut ExecContext<'n>,
    steps: usize,
    changes: ChangeSet,
}

/// Runs `ast` against the live net. Statements execute strictly in order and
/// reads see earlier writes. On error the partial effects are reverted.
pub fn execute(ast: &Ast, mut ctx: ExecContext<'_>) -> Result<ChangeSet, ExecError> {
    let mut m = Machine {
        ctx: &mut ctx,
        steps: 0,
        changes: ChangeSet::default(),
    };
    match m.block(&ast.statements) {
        Ok(()) => Ok(m.changes),
        Err(e) => {
            m.changes.undo(m.ctx.net)?;
            Err(e)
        }
    }
}

impl Machine<'_, '_> {
    fn bind(&self, role: Role) -> Result<NodeId, ExecError> {
        let node = match role {
            Role::Subject => self.ctx.subject,
            Role::Object => Some(self.ctx.target),
            Role::Itself => self.ctx.self_node,
        }
        .ok_or(ExecError::UnboundRole(role))?;
        if self.ctx.net.contains(node) {
            Ok(node)
        } else {
            Err(NetError::UnknownNode(node).into())
        }
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<(), ExecError> {
        for s in stmts {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), ExecError> {
        if self.steps >= self.ctx.step_budget {
            return Err(ExecError::BudgetExhausted(self.ctx.step_budget));
        }
        self.steps += 1;
        match s {
            Stmt::Set(lv, e) => {
                let value = self.eval(e)?;
                self.write(lv, Some(value))
            }
            Stmt::Unset(lv) => self.write(lv, None),
            Stmt::If {
                cond,
                then,
                otherwise,
            } => match self.eval(cond)? {
                Value::Truth(true) => self.block(then),
                Value::Truth(false) => self.block(otherwise),
                other => Err(ExecError::NotATruth(other.kind())),
            },
        }
    }

    fn write(&mut self, lv: &LValue, value: Option<Value>) -> Result<(), ExecError> {
        let node = self.bind(lv.role)?;
        let existing = self.ctx.net.properties(node)?.get(lv.name.as_str());
        let (before, prior) = match existing {
            Some(rec) => match rec.value() {
                Some(v) => (Some(v.clone()), Some(rec.provenance())),
                None => {
                    return Err(ExecError::Unhydrated {
                        node,
                        name: lv.name.to_string(),
                    })
                }
            },
            None => (None, None),
        };
        if before.is_none() && value.is_none() {
            return Err(ExecError::UnknownProperty {
                node,
                name: lv.name.to_string(),
            });
        }
        if before == value {
            return Ok(());
        }
        match &value {
            Some(v) => {
                self.ctx
                    .net
                    .set_property(node, lv.name.as_str(), v.clone(), Provenance::Asserted)?
            }
            None => self.ctx.net.erase_property(node, lv.name.as_str())?,
        }
        self.changes.push(
            PropertyChange {
                node,
                name: lv.name.clone(),
                before,
                after: value,
            },
            prior,
        );
        Ok(())
    }

    fn read(&self, lv: &LValue) -> Result<Value, ExecError> {
        let node = self.bind(lv.role)?;
        let rec = self
            .ctx
            .net
            .properties(node)?
            .get(lv.name.as_str())
            .ok_or_else(|| ExecError::UnknownProperty {
                node,
                name: lv.name.to_string(),
            })?;
        rec.value().cloned().ok_or_else(|| ExecError::Unhydrated {
            node,
            name: lv.name.to_string(),
        })
    }

    fn eval(&self, e: &Expr) -> Result<Value, ExecError> {
        eval_with(e, &|lv| self.read(lv))
    }
}

/// Evaluates an expression, resolving reads through `read`.
pub fn eval_with(
    e: &Expr,
    read: &dyn Fn(&LValue) -> Result<Value, ExecError>,
) -> Result<Value, ExecError> {
    match e {
        Expr::Literal(v) => Ok(v.clone()),
        Expr::Read(lv) => read(lv),
        Expr::Unary(op, inner) => {
            let v = eval_with(inner, read)?;
            match (op, v) {
                (UnOp::Not, Value::Truth(b)) => Ok(Value::Truth(!b)),
                (UnOp::Not, v) => Err(ExecError::NotATruth(v.kind())),
                (UnOp::Neg, Value::Number(n)) => Ok(Value::Number(-n)),
                (UnOp::Neg, v) => Err(ExecError::TypeMismatch {
                    op: "-",
                    left: v.kind(),
                    right: v.kind(),
                }),
            }
        }
        Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            let lhs = match eval_with(l, read)? {
                Value::Truth(b) => b,
                other => return Err(ExecError::NotATruth(other.kind())),
            };
            let short = matches!((op, lhs), (BinOp::And, false) | (BinOp::Or, true));
            if short {
                return Ok(Value::Truth(lhs));
            }
            match eval_with(r, read)? {
                Value::Truth(b) => Ok(Value::Truth(b)),
                other => Err(ExecError::NotATruth(other.kind())),
            }
        }
        Expr::Binary(op, l, r) => {
            let lhs = eval_with(l, read)?;
            let rhs = eval_with(r, read)?;
            binary(*op, lhs, rhs)
        }
    }
}

/// Total equality used by `==`: same kind and equal payload.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x == y,
        _ => a == b,
    }
}

fn finite(n: f64) -> Result<Value, ExecError> {
    if n.is_finite() {
        Ok(Value::Number(n))
    } else {
        Err(ExecError::NonFinite)
    }
}

fn binary(op: BinOp, lhs: Value, rhs: Value) -> Result<Value, ExecError> {
    let mismatch = |l: &Value, r: &Value| ExecError::TypeMismatch {
        op: op.symbol(),
        left: l.kind(),
        right: r.kind(),
    };
    match op {
        BinOp::Eq => Ok(Value::Truth(values_equal(&lhs, &rhs))),
        BinOp::Ne => Ok(Value::Truth(!values_equal(&lhs, &rhs))),
        BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => {
            let ord = match (&lhs, &rhs) {
                (Value::Number(a), Value::Number(b)) => a.partial_cmp(b),
                (Value::Text(a), Value::Text(b)) => Some(a.cmp(b)),
                _ => return Err(mismatch(&lhs, &rhs)),
            };
            let Some(ord) = ord else {
                return Ok(Value::Truth(false));
            };
            Ok(Value::Truth(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Gt => ord.is_gt(),
                BinOp::Le => ord.is_le(),
                _ => ord.is_ge(),
            }))
        }
        BinOp::Add => match (&lhs, &rhs) {
            (Value::Number(a), Value::Number(b)) => finite(a + b),
            (Value::Text(a), Value::Text(b)) => Ok(Value::Text(format!("{a}{b}"))),
            _ => Err(mismatch(&lhs, &rhs)),
        },
        BinOp::Sub | BinOp::Mul | BinOp::Div => {
            let (Value::Number(a), Value::Number(b)) = (&lhs, &rhs) else {
                return Err(mismatch(&lhs, &rhs));
            };
            match op {
                BinOp::Sub => finite(a - b),
                BinOp::Mul => finite(a * b),
                _ if *b == 0.0 => Err(ExecError::DivisionByZero),
                _ => finite(a / b),
            }
        }
        BinOp::And | BinOp::Or => unreachable!("handled with short-circuiting"),
    }
}
