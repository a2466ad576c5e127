//! Lexer and recursive-descent parser for action scripts.
//!
//! ```text
//! script  := { stmt }
//! stmt    := "set" lvalue "=" expr ";" | "unset" lvalue ";"
//!          | "if" expr "{" { stmt } "}" [ "else" "{" { stmt } "}" ]
//! lvalue  := role "." ident
//! expr    := or_expr
//! or_expr := and_expr { "or" and_expr }
//! and_expr:= cmp { "and" cmp }
//! cmp     := add [ ("=="|"!="|"<"|">"|"<="|">=") add ]
//! add     := mul { ("+"|"-") mul }
//! mul     := unary { ("*"|"/") unary }
//! unary   := [ "not" | "-" ] atom
//! atom    := number | string | "true" | "false" | lvalue | "(" expr ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::{Ast, BinOp, Expr, LValue, Role, Stmt, UnOp};
use crate::net::{PropertyName, Value};

/// Upper bound on script source size, in bytes.
pub const MAX_SCRIPT_BYTES: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {expected}")]
pub struct ScriptParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Str(String),
    Word(String),
    Dot,
    Assign,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    EqEq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(n) => write!(f, "number {n}"),
            Tok::Str(_) => f.write_str("string"),
            Tok::Word(w) => write!(f, "'{w}'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Assign => f.write_str("'='"),
            Tok::Semi => f.write_str("';'"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::EqEq => f.write_str("'=='"),
            Tok::Ne => f.write_str("'!='"),
            Tok::Lt => f.write_str("'<'"),
            Tok::Gt => f.write_str("'>'"),
            Tok::Le => f.write_str("'<='"),
            Tok::Ge => f.write_str("'>='"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, expected: impl Into<String>) -> ScriptParseError {
    ScriptParseError {
        line,
        column,
        expected: expected.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ScriptParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let n: f64 = text
                    .parse()
                    .map_err(|_| err(tl, tc, "a number literal"))?;
                if !n.is_finite() {
                    return Err(err(tl, tc, "a finite number literal"));
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Number(n),
                    line: tl,
                    column: tc,
                });
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(err(line, col, "closing '\"'")),
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = match chars.get(i + 1) {
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                Some('\\') => '\\',
                                Some('"') => '"',
                                _ => return Err(err(line, col, "an escape: \\n \\t \\r \\\\ \\\"")),
                            };
                            s.push(esc);
                            i += 2;
                            col += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                out.push(Spanned {
                    tok: Tok::Str(s),
                    line: tl,
                    column: tc,
                });
            }
            'a'..='z' => {
                let start = i;
                i += 1;
                while i < chars.len()
                    && (chars[i].is_ascii_lowercase()
                        || chars[i].is_ascii_digit()
                        || chars[i] == '_'
                        || chars[i] == '-')
                {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line: tl,
                    column: tc,
                });
            }
            _ => {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let (tok, n) = match two.as_str() {
                    "==" => (Tok::EqEq, 2),
                    "!=" => (Tok::Ne, 2),
                    "<=" => (Tok::Le, 2),
                    ">=" => (Tok::Ge, 2),
                    _ => match c {
                        '.' => (Tok::Dot, 1),
                        '=' => (Tok::Assign, 1),
                        ';' => (Tok::Semi, 1),
                        '{' => (Tok::LBrace, 1),
                        '}' => (Tok::RBrace, 1),
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        '<' => (Tok::Lt, 1),
                        '>' => (Tok::Gt, 1),
                        '+' => (Tok::Plus, 1),
                        '-' => (Tok::Minus, 1),
                        '*' => (Tok::Star, 1),
                        '/' => (Tok::Slash, 1),
                        _ => return Err(err(tl, tc, "a token")),
                    },
                };
                bump(n, &mut i, &mut col);
                out.push(Spanned {
                    tok,
                    line: tl,
                    column: tc,
                });
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: impl Into<String>) -> Result<T, ScriptParseError> {
        let s = &self.toks[self.pos];
        Err(err(
            s.line,
            s.column,
            format!("{}, found {}", expected.into(), s.tok),
        ))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ScriptParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.fail(tok.to_string())
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ScriptParseError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.fail("'}'");
            }
            stmts.push(self.stmt()?);
        }
        self.advance();
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ScriptParseError> {
        match self.peek() {
            Tok::Word(w) if w == "set" => {
                self.advance();
                let lv = self.lvalue()?;
                self.expect(Tok::Assign)?;
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Set(lv, e))
            }
            Tok::Word(w) if w == "unset" => {
                self.advance();
                let lv = self.lvalue()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Unset(lv))
            }
            Tok::Word(w) if w == "if" => {
                self.advance();
                let cond = self.expr()?;
                let then = self.block()?;
                let otherwise = if self.is_word("else") {
                    self.advance();
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            _ => self.fail("'set', 'unset' or 'if'"),
        }
    }

    fn role(&mut self) -> Option<Role> {
        let role = match self.peek() {
            Tok::Word(w) if w == "subject" => Role::Subject,
            Tok::Word(w) if w == "object" => Role::Object,
            Tok::Word(w) if w == "self" => Role::Itself,
            _ => return None,
        };
        self.advance();
        Some(role)
    }

    fn lvalue(&mut self) -> Result<LValue, ScriptParseError> {
        let Some(role) = self.role() else {
            return self.fail("a role: 'subject', 'object' or 'self'");
        };
        self.lvalue_rest(role)
    }

    fn lvalue_rest(&mut self, role: Role) -> Result<LValue, ScriptParseError> {
        self.expect(Tok::Dot)?;
        match self.peek().clone() {
            Tok::Word(w) => {
                let name = match PropertyName::new(w) {
                    Ok(n) => n,
                    Err(_) => return self.fail("a property name"),
                };
                self.advance();
                Ok(LValue { role, name })
            }
            _ => self.fail("a property name"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ScriptParseError> {
        let mut lhs = self.and_expr()?;
        while self.is_word("or") {
            self.advance();
            let rhs = self.and_expr()?;
            lhs = Expr::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ScriptParseError> {
        let mut lhs = self.cmp()?;
        while self.is_word("and") {
            self.advance();
            let rhs = self.cmp()?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Expr, ScriptParseError> {
        let lhs = self.add()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Gt => BinOp::Gt,
            Tok::Le => BinOp::Le,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.add()?;
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn add(&mut self) -> Result<Expr, ScriptParseError> {
        let mut lhs = self.mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.mul()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn mul(&mut self) -> Result<Expr, ScriptParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ScriptParseError> {
        if self.is_word("not") {
            self.advance();
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.atom()?)));
        }
        if *self.peek() == Tok::Minus {
            self.advance();
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ScriptParseError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.advance();
                Ok(Expr::Literal(Value::Number(n)))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::Literal(Value::Text(s)))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.advance();
                Ok(Expr::Literal(Value::Truth(w == "true")))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => match self.role() {
                Some(role) => Ok(Expr::Read(self.lvalue_rest(role)?)),
                None => self.fail("an expression"),
            },
        }
    }
}

/// Parses script source into an [`Ast`].
pub fn parse(source: &str) -> Result<Ast, ScriptParseError> {
    if source.len() > MAX_SCRIPT_BYTES {
        return Err(err(
            1,
            1,
            format!("a script of at most {MAX_SCRIPT_BYTES} bytes"),
        ));
    }
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
    };
    let mut statements = Vec::new();
    while *p.peek() != Tok::Eof {
        statements.push(p.stmt()?);
    }
    Ok(Ast { statements })
}
