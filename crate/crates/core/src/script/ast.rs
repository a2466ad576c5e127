use std::fmt;

use crate::net::{PropertyName, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// The action's initiator.
    Subject,
    /// The action's target.
    Object,
    /// The agent's self object.
    Itself,
}

impl Role {
    pub fn keyword(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::Object => "object",
            Role::Itself => "self",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LValue {
    pub role: Role,
    pub name: PropertyName,
}

impl fmt::Display for LValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.role, self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Value),
    Read(LValue),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Set(LValue, Expr),
    Unset(LValue),
    If {
        cond: Expr,
        then: Vec<Stmt>,
        otherwise: Vec<Stmt>,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ast {
    pub statements: Vec<Stmt>,
}

impl Ast {
    /// Every lvalue read or written anywhere in the program.
    pub fn lvalues(&self) -> Vec<&LValue> {
        fn expr<'a>(e: &'a Expr, out: &mut Vec<&'a LValue>) {
            match e {
                Expr::Literal(_) => {}
                Expr::Read(lv) => out.push(lv),
                Expr::Binary(_, l, r) => {
                    expr(l, out);
                    expr(r, out);
                }
                Expr::Unary(_, e) => expr(e, out),
            }
        }
        fn stmts<'a>(ss: &'a [Stmt], out: &mut Vec<&'a LValue>) {
            for s in ss {
                match s {
                    Stmt::Set(lv, e) => {
                        out.push(lv);
                        expr(e, out);
                    }
                    Stmt::Unset(lv) => out.push(lv),
                    Stmt::If {
                        cond,
                        then,
                        otherwise,
                    } => {
                        expr(cond, out);
                        stmts(then, out);
                        stmts(otherwise, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        stmts(&self.statements, &mut out);
        out
    }
}

fn write_literal(v: &Value, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match v {
        Value::Number(n) if *n < 0.0 || (*n == 0.0 && n.is_sign_negative()) => {
            write!(f, "(- {})", -n)
        }
        Value::Number(n) => write!(f, "{n}"),
        Value::Text(s) => {
            f.write_str("\"")?;
            for c in s.chars() {
                match c {
                    '"' => f.write_str("\\\"")?,
                    '\\' => f.write_str("\\\\")?,
                    '\n' => f.write_str("\\n")?,
                    '\t' => f.write_str("\\t")?,
                    '\r' => f.write_str("\\r")?,
                    c => write!(f, "{c}")?,
                }
            }
            f.write_str("\"")
        }
        Value::Truth(b) => write!(f, "{b}"),
        // Not producible by the parser; rendered for diagnostics only.
        other => write!(f, "<{}>", other.kind()),
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesised, so the output reparses to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write_literal(v, f),
            Expr::Read(lv) => write!(f, "{lv}"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Unary(UnOp::Not, e) => write!(f, "(not {e})"),
            Expr::Unary(UnOp::Neg, e) => write!(f, "(- {e})"),
        }
    }
}

fn write_block(stmts: &[Stmt], depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for s in stmts {
        write_stmt(s, depth, f)?;
    }
    Ok(())
}

fn write_stmt(s: &Stmt, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let pad = "  ".repeat(depth);
    match s {
        Stmt::Set(lv, e) => writeln!(f, "{pad}set {lv} = {e};"),
        Stmt::Unset(lv) => writeln!(f, "{pad}unset {lv};"),
        Stmt::If {
            cond,
            then,
            otherwise,
        } => {
            writeln!(f, "{pad}if {cond} {{")?;
            write_block(then, depth + 1, f)?;
            if otherwise.is_empty() {
                writeln!(f, "{pad}}}")
            } else {
                writeln!(f, "{pad}}} else {{")?;
                write_block(otherwise, depth + 1, f)?;
                writeln!(f, "{pad}}}")
            }
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(&self.statements, 0, f)
    }
}
