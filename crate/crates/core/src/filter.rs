//! Node queries: full-text, regex and a small predicate-expression language,
//! plus the highlight / isolate actions.
//!
//! Expression grammar:
//!
//! ```text
//! expr := or
//! or   := and ("||" and)*
//! and  := cmp ("&&" cmp)*
//! cmp  := term (("==" | "!=" | "<" | "<=" | ">" | ">=") term)?
//! term := ident | literal | func "(" args ")" | "!" term | "(" expr ")"
//! args := (expr ("," expr)*)?
//! literal := string | number | "true" | "false"
//! ```
//!
//! Strings are double-quoted with `\"`, `\\`, `\n` and `\t` escapes. Numbers
//! are decimal, optionally negative. Positions in errors are byte offsets
//! into the query source.
//!
//! `typeKind`, `methodKind` and `accessibility` are absent on some entities.
//! An absent value is never equal to anything (`==` is false, `!=` is true);
//! ordering it or passing it to a function is a runtime error, which makes
//! that entity a non-match. `&&` and `||` short-circuit.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use regex::Regex;
use thiserror::Error;

use crate::model::{Accessibility, Entity, EntityGraph, EntityKind, Severity, TypeKind};
use crate::token::Token;
use crate::view::ViewState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryMode {
    FullText,
    Regex,
    Expression,
}

impl QueryMode {
    pub fn parse(s: &str) -> Option<QueryMode> {
        match s {
            "fulltext" | "text" => Some(QueryMode::FullText),
            "regex" => Some(QueryMode::Regex),
            "expression" | "expr" => Some(QueryMode::Expression),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub mode: QueryMode,
    pub source: String,
}

impl Query {
    pub fn new(mode: QueryMode, source: impl Into<String>) -> Self {
        Query { mode, source: source.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchAction {
    Highlight,
    Isolate,
}

pub const FIELDS: [&str; 12] = [
    "name",
    "kind",
    "typeKind",
    "methodKind",
    "accessibility",
    "isStatic",
    "memberCount",
    "instanceMemberCount",
    "staticMemberCount",
    "hasErrors",
    "hasWarnings",
    "hasDoc",
];

pub const FUNCTIONS: [&str; 5] = ["docContains", "contains", "startsWith", "endsWith", "matches"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("empty query")]
    Empty,
    #[error("invalid pattern at offset {position}: {message}")]
    Pattern { position: usize, message: String },
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("type error at offset {position}: {message}")]
    Type { position: usize, message: String },
    #[error("unknown field {name:?} at offset {position}; valid fields: {}", valid.join(", "))]
    UnknownField { position: usize, name: String, valid: Vec<&'static str> },
    #[error("unknown function {name:?} at offset {position}; valid functions: {}", valid.join(", "))]
    UnknownFunction { position: usize, name: String, valid: Vec<&'static str> },
}

impl CompileError {
    pub fn position(&self) -> usize {
        match self {
            CompileError::Empty => 0,
            CompileError::Pattern { position, .. }
            | CompileError::Syntax { position, .. }
            | CompileError::Type { position, .. }
            | CompileError::UnknownField { position, .. }
            | CompileError::UnknownFunction { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("runtime error at offset {position}: {message}")]
pub struct RuntimeError {
    pub position: usize,
    pub message: String,
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Sym(&'static str),
    End,
}

const SYMBOLS: [&str; 12] = ["||", "&&", "==", "!=", "<=", ">=", "<", ">", "!", "(", ")", ","];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, CompileError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c.is_ascii_digit() || (c == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let value = src[start..i].parse::<f64>().map_err(|e| CompileError::Syntax {
                position: start,
                message: e.to_string(),
            })?;
            out.push((Tok::Num(value), start));
        } else if c == b'"' {
            i += 1;
            let mut text = String::new();
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(CompileError::Syntax { position: start, message: "unterminated string".into() });
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\\' => {
                        let Some(esc) = src[i..].chars().next() else {
                            return Err(CompileError::Syntax { position: start, message: "unterminated string".into() });
                        };
                        text.push(match esc {
                            '"' => '"',
                            '\\' => '\\',
                            'n' => '\n',
                            't' => '\t',
                            _ => {
                                return Err(CompileError::Syntax {
                                    position: i - 1,
                                    message: format!("unknown escape \\{esc}"),
                                })
                            }
                        });
                        i += esc.len_utf8();
                    }
                    ch => text.push(ch),
                }
            }
            out.push((Tok::Str(text), start));
        } else if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            i += sym.len();
            out.push((Tok::Sym(sym), start));
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(CompileError::Syntax { position: start, message: format!("unexpected character {ch:?}") });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

// ---------------------------------------------------------------- syntax

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Name,
    Kind,
    TypeKind,
    MethodKind,
    Accessibility,
    IsStatic,
    MemberCount,
    InstanceMemberCount,
    StaticMemberCount,
    HasErrors,
    HasWarnings,
    HasDoc,
}

impl Field {
    fn parse(s: &str) -> Option<Field> {
        Some(match s {
            "name" => Field::Name,
            "kind" => Field::Kind,
            "typeKind" => Field::TypeKind,
            "methodKind" => Field::MethodKind,
            "accessibility" => Field::Accessibility,
            "isStatic" => Field::IsStatic,
            "memberCount" => Field::MemberCount,
            "instanceMemberCount" => Field::InstanceMemberCount,
            "staticMemberCount" => Field::StaticMemberCount,
            "hasErrors" => Field::HasErrors,
            "hasWarnings" => Field::HasWarnings,
            "hasDoc" => Field::HasDoc,
            _ => return None,
        })
    }

    fn ty(self) -> Ty {
        match self {
            Field::Name | Field::Kind => Ty::Str,
            Field::TypeKind | Field::MethodKind | Field::Accessibility => Ty::OptStr,
            Field::IsStatic | Field::HasErrors | Field::HasWarnings | Field::HasDoc => Ty::Bool,
            Field::MemberCount | Field::InstanceMemberCount | Field::StaticMemberCount => Ty::Num,
        }
    }

    /// Closed vocabulary for enum-valued fields.
    fn vocabulary(self) -> Option<Vec<&'static str>> {
        match self {
            Field::Kind => Some(EntityKind::ALL.iter().map(|k| k.as_str()).collect()),
            Field::TypeKind => Some(TypeKind::ALL.iter().map(|k| k.as_str()).collect()),
            Field::Accessibility => Some(Accessibility::ALL.iter().map(|a| a.as_str()).collect()),
            Field::MethodKind => Some(vec!["ordinary", "constructor", "getter", "setter", "operator", "other:…"]),
            _ => None,
        }
    }

    fn admits(self, literal: &str) -> bool {
        match self {
            Field::MethodKind => crate::model::MethodKind::parse(literal).is_some(),
            _ => self.vocabulary().is_none_or(|v| v.contains(&literal)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    DocContains,
    Contains,
    StartsWith,
    EndsWith,
    Matches,
}

impl Func {
    fn parse(s: &str) -> Option<Func> {
        Some(match s {
            "docContains" => Func::DocContains,
            "contains" => Func::Contains,
            "startsWith" => Func::StartsWith,
            "endsWith" => Func::EndsWith,
            "matches" => Func::Matches,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::DocContains => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn from_sym(s: &str) -> Option<CmpOp> {
        Some(match s {
            "==" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            _ => return None,
        })
    }

    fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Bool(bool),
    Num(f64),
    Str(String),
    Field(Field),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Cmp(CmpOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>, Option<Regex>),
}

#[derive(Debug, Clone)]
struct Node {
    expr: Expr,
    pos: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(&self.peek().0, Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), CompileError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {sym:?}")))
        }
    }

    fn unexpected(&self, what: &str) -> CompileError {
        let (tok, pos) = self.peek();
        let found = match tok {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Sym(s) => format!("{s:?}"),
            Tok::End => "end of query".to_string(),
        };
        CompileError::Syntax { position: *pos, message: format!("{what}, found {found}") }
    }

    fn expr(&mut self) -> Result<Node, CompileError> {
        let mut left = self.and()?;
        while let (Tok::Sym("||"), pos) = self.peek().clone() {
            self.bump();
            let right = self.and()?;
            left = Node { expr: Expr::Or(Box::new(left), Box::new(right)), pos };
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Node, CompileError> {
        let mut left = self.cmp()?;
        while let (Tok::Sym("&&"), pos) = self.peek().clone() {
            self.bump();
            let right = self.cmp()?;
            left = Node { expr: Expr::And(Box::new(left), Box::new(right)), pos };
        }
        Ok(left)
    }

    fn cmp(&mut self) -> Result<Node, CompileError> {
        let left = self.term()?;
        if let (Tok::Sym(sym), pos) = self.peek().clone() {
            if let Some(op) = CmpOp::from_sym(sym) {
                self.bump();
                let right = self.term()?;
                if let (Tok::Sym(next), p) = self.peek() {
                    if CmpOp::from_sym(next).is_some() {
                        return Err(CompileError::Syntax {
                            position: *p,
                            message: "comparisons do not chain; use parentheses".into(),
                        });
                    }
                }
                return Ok(Node { expr: Expr::Cmp(op, Box::new(left), Box::new(right)), pos });
            }
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Node, CompileError> {
        let (tok, pos) = self.peek().clone();
        match tok {
            Tok::Sym("!") => {
                self.bump();
                let inner = self.term()?;
                Ok(Node { expr: Expr::Not(Box::new(inner)), pos })
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Node { expr: Expr::Str(s), pos })
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Node { expr: Expr::Num(n), pos })
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat("(") {
                    let func = Func::parse(&name).ok_or_else(|| CompileError::UnknownFunction {
                        position: pos,
                        name: name.clone(),
                        valid: FUNCTIONS.to_vec(),
                    })?;
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    return Ok(Node { expr: Expr::Call(func, args, None), pos });
                }
                match name.as_str() {
                    "true" => Ok(Node { expr: Expr::Bool(true), pos }),
                    "false" => Ok(Node { expr: Expr::Bool(false), pos }),
                    _ => match Field::parse(&name) {
                        Some(field) => Ok(Node { expr: Expr::Field(field), pos }),
                        None if Func::parse(&name).is_some() => Err(CompileError::Syntax {
                            position: pos,
                            message: format!("{name} is a function and needs arguments"),
                        }),
                        None => Err(CompileError::UnknownField { position: pos, name, valid: FIELDS.to_vec() }),
                    },
                }
            }
            _ => Err(self.unexpected("expected a field, literal, function call, '!' or '('")),
        }
    }
}

// ---------------------------------------------------------------- typing

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Num,
    Str,
    /// A string that may be absent.
    OptStr,
}

impl Ty {
    fn stringy(self) -> bool {
        matches!(self, Ty::Str | Ty::OptStr)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Bool => "boolean",
            Ty::Num => "number",
            Ty::Str => "string",
            Ty::OptStr => "optional string",
        })
    }
}

fn type_error(pos: usize, message: String) -> CompileError {
    CompileError::Type { position: pos, message }
}

/// Checks types, compiles `matches` patterns and returns the node's type.
fn check(node: &mut Node) -> Result<Ty, CompileError> {
    let pos = node.pos;
    match &mut node.expr {
        Expr::Bool(_) => Ok(Ty::Bool),
        Expr::Num(_) => Ok(Ty::Num),
        Expr::Str(_) => Ok(Ty::Str),
        Expr::Field(f) => Ok(f.ty()),
        Expr::Not(inner) => {
            let ty = check(inner)?;
            if ty != Ty::Bool {
                return Err(type_error(inner.pos, format!("'!' needs a boolean, found {ty}")));
            }
            Ok(Ty::Bool)
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            for side in [a, b] {
                let ty = check(side)?;
                if ty != Ty::Bool {
                    return Err(type_error(side.pos, format!("logical operands must be boolean, found {ty}")));
                }
            }
            Ok(Ty::Bool)
        }
        Expr::Cmp(op, a, b) => {
            let (ta, tb) = (check(a)?, check(b)?);
            let ok = if op.is_ordering() {
                (ta == Ty::Num && tb == Ty::Num) || (ta.stringy() && tb.stringy())
            } else {
                ta == tb || (ta.stringy() && tb.stringy())
            };
            if !ok {
                return Err(type_error(pos, format!("cannot compare {ta} with {tb}")));
            }
            for (field, literal) in [(&a.expr, &b.expr), (&b.expr, &a.expr)] {
                if let (Expr::Field(f), Expr::Str(s)) = (field, literal) {
                    if !op.is_ordering() && !f.admits(s) {
                        let valid = f.vocabulary().unwrap_or_default().join(", ");
                        return Err(type_error(pos, format!("{s:?} is not a possible value; expected one of {valid}")));
                    }
                }
            }
            Ok(Ty::Bool)
        }
        Expr::Call(func, args, regex) => {
            if args.len() != func.arity() {
                return Err(type_error(pos, format!("expects {} argument(s), found {}", func.arity(), args.len())));
            }
            for arg in args.iter_mut() {
                let ty = check(arg)?;
                if !ty.stringy() {
                    return Err(type_error(arg.pos, format!("expected a string argument, found {ty}")));
                }
            }
            if *func == Func::Matches {
                let Expr::Str(pattern) = &args[1].expr else {
                    return Err(type_error(args[1].pos, "the pattern of matches() must be a string literal".into()));
                };
                let literal = args[1].pos;
                let escaped = pattern.contains(['\\', '"', '\n', '\t']);
                *regex = Some(compile_regex(pattern).map_err(|e| match e {
                    // map into the query text; escapes shift offsets, so
                    // escaped literals point at the opening quote instead
                    CompileError::Pattern { position, message } => CompileError::Pattern {
                        position: if escaped { literal } else { literal + 1 + position },
                        message,
                    },
                    other => other,
                })?);
            }
            Ok(Ty::Bool)
        }
    }
}

fn compile_regex(pattern: &str) -> Result<Regex, CompileError> {
    if let Err(e) = regex_syntax::ast::parse::Parser::new().parse(pattern) {
        return Err(CompileError::Pattern { position: e.span().start.offset, message: e.kind().to_string() });
    }
    if let Err(regex_syntax::Error::Translate(e)) = regex_syntax::Parser::new().parse(pattern) {
        return Err(CompileError::Pattern { position: e.span().start.offset, message: e.kind().to_string() });
    }
    Regex::new(pattern).map_err(|e| CompileError::Pattern { position: 0, message: e.to_string() })
}

// ---------------------------------------------------------------- evaluation

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Bool(bool),
    Num(f64),
    Str(String),
    Absent,
}

fn field_value(e: &Entity, f: Field) -> Value {
    match f {
        Field::Name => Value::Str(e.name.clone()),
        Field::Kind => Value::Str(e.kind.as_str().to_string()),
        Field::TypeKind => e.type_kind.map_or(Value::Absent, |k| Value::Str(k.as_str().to_string())),
        Field::MethodKind => e.method_kind.as_ref().map_or(Value::Absent, |k| Value::Str(k.label())),
        Field::Accessibility => e.accessibility.map_or(Value::Absent, |a| Value::Str(a.as_str().to_string())),
        Field::IsStatic => Value::Bool(e.is_static),
        Field::MemberCount => Value::Num(f64::from(e.member_count())),
        Field::InstanceMemberCount => Value::Num(f64::from(e.instance_member_count)),
        Field::StaticMemberCount => Value::Num(f64::from(e.static_member_count)),
        Field::HasErrors => Value::Bool(e.has_severity(Severity::Error)),
        Field::HasWarnings => Value::Bool(e.has_severity(Severity::Warning)),
        Field::HasDoc => Value::Bool(e.doc_comment.is_some()),
    }
}

fn eval(node: &Node, e: &Entity) -> Result<Value, RuntimeError> {
    let absent = |what: &str| RuntimeError { position: node.pos, message: format!("{what} on an absent value") };
    Ok(match &node.expr {
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Num(n) => Value::Num(*n),
        Expr::Str(s) => Value::Str(s.clone()),
        Expr::Field(f) => field_value(e, *f),
        Expr::Not(inner) => Value::Bool(!truth(&eval(inner, e)?)),
        Expr::And(a, b) => Value::Bool(truth(&eval(a, e)?) && truth(&eval(b, e)?)),
        Expr::Or(a, b) => Value::Bool(truth(&eval(a, e)?) || truth(&eval(b, e)?)),
        Expr::Cmp(op, a, b) => {
            let (va, vb) = (eval(a, e)?, eval(b, e)?);
            let result = match (op, &va, &vb) {
                (CmpOp::Eq, Value::Absent, _) | (CmpOp::Eq, _, Value::Absent) => false,
                (CmpOp::Ne, Value::Absent, _) | (CmpOp::Ne, _, Value::Absent) => true,
                (_, Value::Absent, _) | (_, _, Value::Absent) => return Err(absent("ordering comparison")),
                (CmpOp::Eq, x, y) => x == y,
                (CmpOp::Ne, x, y) => x != y,
                (op, Value::Num(x), Value::Num(y)) => ordered(*op, x.partial_cmp(y)),
                (op, Value::Str(x), Value::Str(y)) => ordered(*op, Some(x.cmp(y))),
                _ => unreachable!("rejected by the type checker"),
            };
            Value::Bool(result)
        }
        Expr::Call(func, args, regex) => {
            let mut strings = Vec::with_capacity(args.len());
            for arg in args {
                match eval(arg, e)? {
                    Value::Str(s) => strings.push(s),
                    Value::Absent => return Err(absent("function argument")),
                    _ => unreachable!("rejected by the type checker"),
                }
            }
            Value::Bool(match func {
                Func::DocContains => e
                    .doc_comment
                    .as_ref()
                    .is_some_and(|d| d.plain_text().to_lowercase().contains(&strings[0].to_lowercase())),
                Func::Contains => strings[0].contains(strings[1].as_str()),
                Func::StartsWith => strings[0].starts_with(strings[1].as_str()),
                Func::EndsWith => strings[0].ends_with(strings[1].as_str()),
                Func::Matches => regex.as_ref().expect("compiled with the query").is_match(&strings[0]),
            })
        }
    })
}

fn truth(v: &Value) -> bool {
    matches!(v, Value::Bool(true))
}

fn ordered(op: CmpOp, ord: Option<std::cmp::Ordering>) -> bool {
    use std::cmp::Ordering::*;
    match (op, ord) {
        (_, None) => false,
        (CmpOp::Lt, Some(o)) => o == Less,
        (CmpOp::Le, Some(o)) => o != Greater,
        (CmpOp::Gt, Some(o)) => o == Greater,
        (CmpOp::Ge, Some(o)) => o != Less,
        (CmpOp::Eq, Some(o)) => o == Equal,
        (CmpOp::Ne, Some(o)) => o != Equal,
    }
}

// ---------------------------------------------------------------- public API

#[derive(Debug, Clone)]
enum Compiled {
    FullText(String),
    Regex(Regex),
    Expression(Node),
}

/// A compiled query; reusable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Predicate {
    compiled: Compiled,
}

impl Predicate {
    /// Whether `e` matches, or the runtime error that prevented deciding.
    pub fn test(&self, e: &Entity) -> Result<bool, RuntimeError> {
        match &self.compiled {
            Compiled::FullText(needle) => Ok(e.name.to_lowercase().contains(needle.as_str())),
            Compiled::Regex(re) => Ok(re.is_match(&e.name)),
            Compiled::Expression(node) => eval(node, e).map(|v| truth(&v)),
        }
    }

    /// Runtime errors count as non-matches.
    pub fn matches(&self, e: &Entity) -> bool {
        self.test(e).unwrap_or(false)
    }
}

pub fn compile_query(q: &Query) -> Result<Predicate, CompileError> {
    if q.source.trim().is_empty() {
        return Err(CompileError::Empty);
    }
    let compiled = match q.mode {
        QueryMode::FullText => Compiled::FullText(q.source.to_lowercase()),
        QueryMode::Regex => Compiled::Regex(compile_regex(&q.source)?),
        QueryMode::Expression => {
            let mut parser = Parser { toks: lex(&q.source)?, at: 0 };
            let mut node = parser.expr()?;
            if parser.peek().0 != Tok::End {
                return Err(parser.unexpected("expected an operator or end of query"));
            }
            let ty = check(&mut node)?;
            if ty != Ty::Bool {
                return Err(type_error(node.pos, format!("a query must be boolean, found {ty}")));
            }
            Compiled::Expression(node)
        }
    };
    Ok(Predicate { compiled })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub matches: BTreeSet<Token>,
    /// The first runtime error in token order, with the entity it hit.
    pub error: Option<(Token, RuntimeError)>,
    /// How many entities hit a runtime error.
    pub error_count: usize,
}

/// Matches within `scope`. Tokens missing from `g` are skipped.
pub fn evaluate(p: &Predicate, g: &EntityGraph, scope: &BTreeSet<Token>) -> Evaluation {
    let scope: Vec<&Token> = scope.iter().collect();
    let results: Vec<(&Token, Result<bool, RuntimeError>)> = scope
        .par_iter()
        .filter_map(|t| g.entity(t).map(|e| (*t, p.test(e))))
        .collect();
    let mut out = Evaluation { matches: BTreeSet::new(), error: None, error_count: 0 };
    for (t, r) in results {
        match r {
            Ok(true) => {
                out.matches.insert(t.clone());
            }
            Ok(false) => {}
            Err(err) => {
                out.error_count += 1;
                if out.error.is_none() {
                    out.error = Some((t.clone(), err));
                }
            }
        }
    }
    out
}

/// `matches` plus every ancestor, restricted to what `vs` shows.
pub fn isolation_set(matches: &BTreeSet<Token>, vs: &ViewState) -> BTreeSet<Token> {
    let mut keep = BTreeSet::new();
    for t in matches {
        if !vs.is_visible(t) {
            continue;
        }
        keep.insert(t.clone());
        for a in t.ancestors() {
            if vs.is_visible(&a) {
                keep.insert(a);
            }
        }
    }
    keep
}

pub fn apply(matches: &BTreeSet<Token>, action: MatchAction, vs: &ViewState) -> ViewState {
    match action {
        MatchAction::Highlight => {
            vs.with_highlighted(matches.iter().filter(|t| vs.is_visible(t)).cloned().collect())
        }
        MatchAction::Isolate => vs.isolate(&isolation_set(matches, vs)),
    }
}

// ---------------------------------------------------------------- library

/// Named filters, as `(name, parameter, expression template)`. `{n}` is
/// replaced by the parameter.
pub const LIBRARY: [(&str, Option<&str>, &str); 6] = [
    ("has-errors", None, "hasErrors"),
    ("has-warnings", None, "hasWarnings"),
    ("large-types", Some("n"), "kind == \"type\" && memberCount > {n}"),
    ("documented", None, "hasDoc"),
    ("undocumented-public", None, "accessibility == \"public\" && !hasDoc"),
    ("static-classes", None, "typeKind == \"class\" && isStatic"),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LibraryError {
    #[error("unknown filter {0:?}; available: has-errors, has-warnings, large-types(n), documented, undocumented-public, static-classes")]
    Unknown(String),
    #[error("filter {name} {problem}")]
    Parameter { name: String, problem: String },
}

/// Expands a library reference such as `large-types(10)` into a query.
pub fn library_query(reference: &str) -> Result<Query, LibraryError> {
    let reference = reference.trim();
    let (name, arg) = match reference.split_once('(') {
        Some((name, rest)) => {
            let arg = rest.strip_suffix(')').ok_or_else(|| LibraryError::Parameter {
                name: name.to_string(),
                problem: "is missing a closing ')'".into(),
            })?;
            (name.trim(), Some(arg.trim()))
        }
        None => (reference, None),
    };
    let (_, param, template) = LIBRARY
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| LibraryError::Unknown(name.to_string()))?;
    let source = match (param, arg) {
        (None, None) => template.to_string(),
        (Some(_), Some(arg)) => {
            let n: u32 = arg.parse().map_err(|_| LibraryError::Parameter {
                name: name.to_string(),
                problem: format!("needs a non-negative integer, got {arg:?}"),
            })?;
            template.replace("{n}", &n.to_string())
        }
        (Some(p), None) => {
            return Err(LibraryError::Parameter { name: name.to_string(), problem: format!("needs a parameter {p}") })
        }
        (None, Some(_)) => {
            return Err(LibraryError::Parameter { name: name.to_string(), problem: "takes no parameter".into() })
        }
    };
    Ok(Query::new(QueryMode::Expression, source))
}
