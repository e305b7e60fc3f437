//! Formula grammar: parsing and canonical rendering.
//!
//! The grammar is deliberately small:
//!
//! ```text
//! formula  := '=' expr
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | primary
//! primary  := number | string | ref | call | '(' expr ')'
//! call     := name '(' arg (',' arg)* ')'
//! arg      := ref ':' ref | expr
//! ```
//!
//! Multiplication and division bind tighter than addition and subtraction,
//! and all binary operators associate to the left. Ranges are only legal as
//! function arguments. Function names and references are case-insensitive.

use std::fmt;

use thiserror::Error;

use crate::cell::{CellRef, RangeRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Sum,
    Lookup,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Sum => "SUM",
            Function::Lookup => "LOOKUP",
        }
    }

    fn from_name(name: &str) -> Option<Function> {
        match name.to_ascii_uppercase().as_str() {
            "SUM" => Some(Function::Sum),
            "LOOKUP" => Some(Function::Lookup),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Text(String),
    Ref(CellRef),
    Range(RangeRef),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Neg(Box<Expr>),
    Call {
        func: Function,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Neg(inner) => inner.walk(f),
            Expr::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    /// Pre-order traversal, same visiting order as [`Expr::walk`].
    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        match self {
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk_mut(f);
                rhs.walk_mut(f);
            }
            Expr::Neg(inner) => inner.walk_mut(f),
            Expr::Call { args, .. } => args.iter_mut().for_each(|a| a.walk_mut(f)),
            _ => {}
        }
    }

    /// Every cell the expression reads, ranges expanded, in reading order.
    /// Duplicates are kept.
    pub fn referenced_cells(&self) -> Vec<CellRef> {
        let mut out = Vec::new();
        self.walk(&mut |e| match e {
            Expr::Ref(r) => out.push(*r),
            Expr::Range(range) => out.extend(range.cells()),
            _ => {}
        });
        out
    }

    /// Canonical source text including the leading `=`.
    pub fn to_formula(&self) -> String {
        format!("={self}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Text(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Expr::Ref(r) => write!(f, "{r}"),
            Expr::Range(r) => write!(f, "{r}"),
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                if lhs.precedence() < p {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, "{}", op.symbol())?;
                if rhs.precedence() <= p {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
            Expr::Neg(inner) => {
                if inner.precedence() < 3 {
                    write!(f, "-({inner})")
                } else {
                    write!(f, "-{inner}")
                }
            }
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("formula must start with `=`")]
    MissingEquals,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of formula")]
    UnexpectedEnd,
    #[error("unterminated text literal")]
    UnterminatedText,
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("malformed reference `{0}`")]
    BadReference(String),
    #[error("malformed range: {0}")]
    MalformedRange(String),
    #[error("bad arguments to {0}: {1}")]
    BadArguments(&'static str, String),
}

/// A syntax error; `offset` counts characters from the start of the source,
/// including the leading `=`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Str(String),
    Word(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    Colon,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Str(_) => "text literal".into(),
        Tok::Word(w) => format!("`{w}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
    }
}

fn tokenize(chars: &[char], start: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut i = start;
    while i < chars.len() {
        let c = chars[i];
        let at = i;
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' | '-' | '*' | '/' => {
                out.push((Tok::Op(c), at));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, at));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, at));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, at));
                i += 1;
            }
            ':' => {
                out.push((Tok::Colon, at));
                i += 1;
            }
            '"' => {
                let mut text = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(ParseError {
                                offset: at,
                                kind: ParseErrorKind::UnterminatedText,
                            })
                        }
                        Some('"') if chars.get(i + 1) == Some(&'"') => {
                            text.push('"');
                            i += 2;
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            text.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Str(text), at));
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                let mut seen_dot = false;
                while let Some(&ch) = chars.get(i) {
                    if ch.is_ascii_digit() {
                        s.push(ch);
                    } else if ch == '.' && !seen_dot {
                        seen_dot = true;
                        s.push(ch);
                    } else {
                        break;
                    }
                    i += 1;
                }
                let n: f64 = s.parse().map_err(|_| ParseError {
                    offset: at,
                    kind: ParseErrorKind::UnexpectedChar('.'),
                })?;
                out.push((Tok::Num(n), at));
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&ch) = chars.get(i) {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        s.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Word(s), at));
            }
            other => {
                return Err(ParseError {
                    offset: at,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(describe(t))),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn cell(&self, word: &str, at: usize) -> Result<CellRef, ParseError> {
        word.parse().map_err(|_| ParseError {
            offset: at,
            kind: ParseErrorKind::BadReference(word.to_string()),
        })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Number(n))
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Expr::Text(s))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Word(w)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let func = Function::from_name(&w).ok_or(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownFunction(w.clone()),
                    })?;
                    self.pos += 1;
                    let args = self.args()?;
                    check_args(func, &args).map_err(|reason| ParseError {
                        offset: at,
                        kind: ParseErrorKind::BadArguments(func.name(), reason),
                    })?;
                    return Ok(Expr::Call { func, args });
                }
                if w.bytes().all(|b| b.is_ascii_alphabetic()) {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownFunction(w),
                    });
                }
                let cell = self.cell(&w, at)?;
                if self.peek() == Some(&Tok::Colon) {
                    return Err(self.err(ParseErrorKind::MalformedRange(
                        "ranges are only allowed as function arguments".into(),
                    )));
                }
                Ok(Expr::Ref(cell))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn arg(&mut self) -> Result<Expr, ParseError> {
        if let (Some((Tok::Word(w), at)), Some((Tok::Colon, _))) = (
            self.toks.get(self.pos).cloned(),
            self.toks.get(self.pos + 1),
        ) {
            let from = self.cell(&w, at)?;
            self.pos += 2;
            let at2 = self.offset();
            let to = match self.bump() {
                Some(Tok::Word(w2)) => self.cell(&w2, at2)?,
                _ => {
                    return Err(ParseError {
                        offset: at2,
                        kind: ParseErrorKind::MalformedRange("expected a cell after `:`".into()),
                    })
                }
            };
            return Ok(Expr::Range(RangeRef::new(from, to)));
        }
        self.expr()
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = vec![self.arg()?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    args.push(self.arg()?);
                }
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return Err(self.unexpected()),
            }
        }
    }
}

fn check_args(func: Function, args: &[Expr]) -> Result<(), String> {
    match func {
        Function::Sum => {
            for a in args {
                let ok = match a {
                    Expr::Ref(_) | Expr::Range(_) | Expr::Number(_) => true,
                    Expr::Neg(inner) => matches!(**inner, Expr::Number(_)),
                    _ => false,
                };
                if !ok {
                    return Err(format!("`{a}` is not a reference, range or number"));
                }
            }
            Ok(())
        }
        Function::Lookup => {
            let [key, keys, results] = args else {
                return Err(format!("expected 3 arguments, found {}", args.len()));
            };
            if matches!(key, Expr::Range(_)) {
                return Err("the key must be a single value".into());
            }
            let (Expr::Range(k), Expr::Range(r)) = (keys, results) else {
                return Err("key and result tables must be ranges".into());
            };
            if !k.is_line() || !r.is_line() {
                return Err("key and result tables must be a single row or column".into());
            }
            if k.len() != r.len() {
                return Err(format!(
                    "key table has {} cells but result table has {}",
                    k.len(),
                    r.len()
                ));
            }
            Ok(())
        }
    }
}

/// Parses formula source text. The source must start with `=`.
pub fn parse_formula(source: &str) -> Result<Expr, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    if chars.first() != Some(&'=') {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::MissingEquals,
        });
    }
    let toks = tokenize(&chars, 1)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: chars.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}
