//! The action-script language: an action's executable instructions, phrased
//! as changes to the properties of its subject, its target (`object`) and
//! the agent's self object.
//!
//! Scripts are loop-free and every execution runs under a statement budget,
//! so simulation always halts.

mod ast;
mod check;
mod interp;
mod parser;

pub use ast::{Ast, BinOp, Expr, LValue, Role, Stmt, UnOp};
pub use check::{check, StaticIssue};
pub use interp::{
    eval_with, execute, values_equal, ChangeSet, ExecContext, ExecError, PropertyChange,
    DEFAULT_STEP_BUDGET,
};
pub use parser::{parse, ScriptParseError, MAX_SCRIPT_BYTES};
