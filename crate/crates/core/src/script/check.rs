use super::ast::{Ast, Expr, Role, Stmt};
use super::interp::{eval_with, ExecError};
use crate::net::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StaticIssue {
    /// The script reads or writes a role that callers must bind.
    RequiresRole(Role),
    /// An `if` whose condition is constant, leaving one branch unreachable.
    DeadBranch { taken: bool },
}

/// Folds an expression that does not read the net.
fn constant(e: &Expr) -> Option<Value> {
    eval_with(e, &|_| Err(ExecError::UnboundRole(Role::Object))).ok()
}

fn reads_net(e: &Expr) -> bool {
    match e {
        Expr::Literal(_) => false,
        Expr::Read(_) => true,
        Expr::Binary(_, l, r) => reads_net(l) || reads_net(r),
        Expr::Unary(_, e) => reads_net(e),
    }
}

fn walk(stmts: &[Stmt], out: &mut Vec<StaticIssue>) {
    for s in stmts {
        if let Stmt::If {
            cond,
            then,
            otherwise,
        } = s
        {
            if !reads_net(cond) {
                match constant(cond) {
                    Some(Value::Truth(false)) => out.push(StaticIssue::DeadBranch { taken: false }),
                    Some(Value::Truth(true)) if !otherwise.is_empty() => {
                        out.push(StaticIssue::DeadBranch { taken: true })
                    }
                    _ => {}
                }
            }
            walk(then, out);
            walk(otherwise, out);
        }
    }
}

/// Reports what can be known about a script without running it: roles other
/// than `object` that must be bound, and branches a constant condition
/// makes unreachable.
pub fn check(ast: &Ast) -> Vec<StaticIssue> {
    let mut out = Vec::new();
    for role in [Role::Subject, Role::Itself] {
        if ast.lvalues().iter().any(|lv| lv.role == role) {
            out.push(StaticIssue::RequiresRole(role));
        }
    }
    walk(&ast.statements, &mut out);
    out
}
