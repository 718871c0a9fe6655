//! Lexer, Pratt parser and typechecker for the concrete syntax.
//!
//! Parsing produces an untyped surface tree which is then elaborated against
//! a [`Signature`]. Elaboration is bidirectional so that `{}` can take its
//! type from the surrounding operator.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use super::ast::{Formula, Op, Pred, Signature, Term, Var, KEYWORDS};
use super::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("type error at {line}:{col} in `{subterm}`: {msg}")]
    Type {
        line: usize,
        col: usize,
        subterm: String,
        msg: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBrace,
    RBrace,
    EmptySet,
    Comma,
    Semi,
    Dot,
    Colon,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
    True,
    False,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Mem,
    NotMem,
    Subset,
    Plus,
    Minus,
    Star,
    Slash,
    DotDot,
    Union,
    Inter,
    Backslash,
    Ovl,
    Maplet,
    StarStar,
    Arrow,
    Oftype,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(i) => return write!(f, "`{i}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::EmptySet => "{}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Not => "not",
            Tok::And => "&",
            Tok::Or => "or",
            Tok::Implies => "=>",
            Tok::Iff => "<=>",
            Tok::Forall => "!",
            Tok::Exists => "#",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Eq => "=",
            Tok::Neq => "/=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Mem => ":",
            Tok::NotMem => "/:",
            Tok::Subset => "<:",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::DotDot => "..",
            Tok::Union => "\\/",
            Tok::Inter => "/\\",
            Tok::Backslash => "\\",
            Tok::Ovl => "ovl",
            Tok::Maplet => "|->",
            Tok::StarStar => "**",
            Tok::Arrow => "->",
            Tok::Oftype => "oftype",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    const ASCII_OPS: &[(&str, Tok)] = &[
        ("<=>", Tok::Iff),
        ("|->", Tok::Maplet),
        ("<=", Tok::Le),
        ("<+", Tok::Ovl),
        ("<:", Tok::Subset),
        ("=>", Tok::Implies),
        (">=", Tok::Ge),
        ("/=", Tok::Neq),
        ("/\\", Tok::Inter),
        ("/:", Tok::NotMem),
        ("\\/", Tok::Union),
        ("->", Tok::Arrow),
        ("..", Tok::DotDot),
        ("**", Tok::StarStar),
        ("<", Tok::Lt),
        (">", Tok::Gt),
        ("=", Tok::Eq),
        ("/", Tok::Slash),
        ("\\", Tok::Backslash),
        ("-", Tok::Minus),
        (".", Tok::Dot),
        ("*", Tok::Star),
        (":", Tok::Colon),
        ("!", Tok::Forall),
        ("#", Tok::Exists),
        ("&", Tok::And),
        ("+", Tok::Plus),
        ("(", Tok::LParen),
        (")", Tok::RParen),
        ("{", Tok::LBrace),
        ("}", Tok::RBrace),
        (",", Tok::Comma),
        (";", Tok::Semi),
    ];
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().expect("non-empty");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if rest.starts_with("//") {
            i += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        if c.is_ascii_digit() {
            let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let value: BigInt = rest[..len].parse().expect("digits");
            out.push(Token {
                tok: Tok::Int(value),
                start: i,
                end: i + len,
            });
            i += len;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '\''))
                .unwrap_or(rest.len());
            let word = &rest[..len];
            let tok = match word {
                "not" => Tok::Not,
                "or" => Tok::Or,
                "ovl" => Tok::Ovl,
                "true" | "btrue" => Tok::True,
                "false" | "bfalse" => Tok::False,
                "oftype" => Tok::Oftype,
                _ => Tok::Ident(word.to_string()),
            };
            out.push(Token {
                tok,
                start: i,
                end: i + len,
            });
            i += len;
            continue;
        }
        let unicode = match c {
            '∀' => Some(Tok::Forall),
            '∃' => Some(Tok::Exists),
            '·' => Some(Tok::Dot),
            '∧' => Some(Tok::And),
            '∨' => Some(Tok::Or),
            '⇒' => Some(Tok::Implies),
            '⇔' => Some(Tok::Iff),
            '¬' => Some(Tok::Not),
            '↦' => Some(Tok::Maplet),
            '∅' => Some(Tok::EmptySet),
            '∈' => Some(Tok::Mem),
            '∉' => Some(Tok::NotMem),
            '⊆' => Some(Tok::Subset),
            '≤' => Some(Tok::Le),
            '≥' => Some(Tok::Ge),
            '≠' => Some(Tok::Neq),
            '∪' => Some(Tok::Union),
            '∩' => Some(Tok::Inter),
            '∖' => Some(Tok::Backslash),
            '×' => Some(Tok::StarStar),
            '⊥' => Some(Tok::False),
            '⊤' => Some(Tok::True),
            '÷' => Some(Tok::Slash),
            '−' => Some(Tok::Minus),
            '→' => Some(Tok::Arrow),
            '\u{E103}' => Some(Tok::Ovl),
            'ℙ' => Some(Tok::Ident("POW".into())),
            'ℤ' => Some(Tok::Ident("INT".into())),
            _ => None,
        };
        if let Some(tok) = unicode {
            out.push(Token {
                tok,
                start: i,
                end: i + c.len_utf8(),
            });
            i += c.len_utf8();
            continue;
        }
        match ASCII_OPS.iter().find(|(s, _)| rest.starts_with(s)) {
            Some((s, tok)) => {
                out.push(Token {
                    tok: tok.clone(),
                    start: i,
                    end: i + s.len(),
                });
                i += s.len();
            }
            None => {
                let (line, col) = line_col(src, i);
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        start: src.len(),
        end: src.len(),
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum BinOp {
    Iff,
    Implies,
    Or,
    And,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Mem,
    NotMem,
    Subset,
    Maplet,
    Union,
    Inter,
    Diff,
    Ovl,
    Range,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn from_tok(t: &Tok) -> Option<BinOp> {
        Some(match t {
            Tok::Iff => BinOp::Iff,
            Tok::Implies => BinOp::Implies,
            Tok::Or => BinOp::Or,
            Tok::And => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Neq,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Mem | Tok::Colon => BinOp::Mem,
            Tok::NotMem => BinOp::NotMem,
            Tok::Subset => BinOp::Subset,
            Tok::Maplet => BinOp::Maplet,
            Tok::Union => BinOp::Union,
            Tok::Inter => BinOp::Inter,
            Tok::Backslash => BinOp::Diff,
            Tok::Ovl => BinOp::Ovl,
            Tok::DotDot => BinOp::Range,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            _ => return None,
        })
    }

    fn binding_power(self) -> (u8, u8) {
        match self {
            BinOp::Iff => (1, 2),
            BinOp::Implies => (4, 3),
            BinOp::Or => (5, 6),
            BinOp::And => (7, 8),
            BinOp::Eq
            | BinOp::Neq
            | BinOp::Lt
            | BinOp::Le
            | BinOp::Gt
            | BinOp::Ge
            | BinOp::Mem
            | BinOp::NotMem
            | BinOp::Subset => (11, 12),
            BinOp::Maplet => (13, 14),
            BinOp::Union | BinOp::Inter | BinOp::Diff | BinOp::Ovl => (15, 16),
            BinOp::Range => (17, 18),
            BinOp::Add | BinOp::Sub => (19, 20),
            BinOp::Mul | BinOp::Div => (21, 22),
        }
    }

    fn non_assoc(self) -> bool {
        matches!(
            self,
            BinOp::Eq
                | BinOp::Neq
                | BinOp::Lt
                | BinOp::Le
                | BinOp::Gt
                | BinOp::Ge
                | BinOp::Mem
                | BinOp::NotMem
                | BinOp::Subset
                | BinOp::Range
        )
    }
}

const NOT_BP: u8 = 9;
const APPLY_BP: u8 = 23;

#[derive(Debug, Clone)]
pub(crate) struct SNode {
    kind: SKind,
    start: usize,
    end: usize,
}

#[derive(Debug, Clone)]
enum SKind {
    Ident(String),
    Int(BigInt),
    Empty(Option<Type>),
    Enum(Vec<SNode>),
    Call(String, Vec<SNode>),
    Apply(Box<SNode>, Box<SNode>),
    Bin(BinOp, Box<SNode>, Box<SNode>),
    Not(Box<SNode>),
    Quant(bool, String, Type, Box<SNode>),
    True,
    False,
}

impl SNode {
    /// True when the node's type cannot be inferred bottom-up (it is built
    /// only from unannotated empty sets).
    fn is_bare_empty(&self) -> bool {
        match &self.kind {
            SKind::Empty(None) => true,
            SKind::Enum(elems) => elems.iter().all(SNode::is_bare_empty),
            SKind::Bin(BinOp::Union | BinOp::Inter | BinOp::Diff | BinOp::Ovl, a, b) => {
                a.is_bare_empty() && b.is_bare_empty()
            }
            SKind::Bin(BinOp::Maplet, a, b) => a.is_bare_empty() || b.is_bare_empty(),
            _ => false,
        }
    }
}

/// Token-stream parser, shared with the theory and sequent file readers.
pub(crate) struct Parser<'s> {
    pub src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    colon_sep: bool,
}

impl<'s> Parser<'s> {
    pub fn new(src: &'s str) -> Result<Self, ParseError> {
        Ok(Parser {
            src,
            toks: lex(src)?,
            pos: 0,
            colon_sep: false,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn offset(&self) -> usize {
        self.toks[self.pos].start
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.src, self.offset());
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {t}, found {}", self.peek())))
        }
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error_here(format!("expected an identifier, found {t}"))),
        }
    }

    /// Accepts an identifier equal to `kw`.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error_here(format!("unexpected {}", self.peek())))
        }
    }

    pub fn ty(&mut self) -> Result<Type, ParseError> {
        let mut t = self.ty_atom()?;
        while self.eat(&Tok::StarStar) {
            let r = self.ty_atom()?;
            t = Type::prod(t, r);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "INT" => {
                self.bump();
                Ok(Type::Int)
            }
            Tok::Ident(s) if s == "POW" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(Type::pow(t))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Type::Given(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => Err(self.error_here(format!("expected a type, found {t}"))),
        }
    }

    pub fn expr(&mut self, min_bp: u8) -> Result<SNode, ParseError> {
        let start = self.offset();
        let mut lhs = self.prefix()?;
        let mut last_non_assoc: Option<(BinOp, u8)> = None;
        loop {
            let tok = self.peek().clone();
            if tok == Tok::LParen && APPLY_BP >= min_bp {
                self.bump();
                let arg = self.nested()?;
                self.expect(Tok::RParen)?;
                lhs = SNode {
                    kind: SKind::Apply(Box::new(lhs), Box::new(arg)),
                    start,
                    end: self.prev_end(),
                };
                continue;
            }
            if tok == Tok::Colon && self.colon_sep {
                break;
            }
            let Some(op) = BinOp::from_tok(&tok) else {
                break;
            };
            let (l_bp, r_bp) = op.binding_power();
            if l_bp < min_bp {
                break;
            }
            if let Some((prev, bp)) = last_non_assoc {
                if bp == l_bp && op.non_assoc() {
                    return Err(self.error_here(format!(
                        "{tok} cannot follow {} without parentheses",
                        binop_symbol(prev)
                    )));
                }
            }
            self.bump();
            let rhs = self.expr(r_bp)?;
            lhs = SNode {
                kind: SKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                start,
                end: self.prev_end(),
            };
            last_non_assoc = op.non_assoc().then_some((op, l_bp));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<SNode, ParseError> {
        let start = self.offset();
        let at = self.pos;
        let node = |p: &Self, kind| SNode {
            kind,
            start,
            end: p.prev_end(),
        };
        match self.bump() {
            Tok::Int(i) => Ok(node(self, SKind::Int(i))),
            Tok::Minus => match self.bump() {
                Tok::Int(i) => Ok(node(self, SKind::Int(-i))),
                _ => Err(self.error_here("unary minus only applies to integer literals")),
            },
            Tok::True => Ok(node(self, SKind::True)),
            Tok::False => Ok(node(self, SKind::False)),
            Tok::Not => {
                let body = self.expr(NOT_BP)?;
                Ok(node(self, SKind::Not(Box::new(body))))
            }
            Tok::Forall | Tok::Exists => {
                let forall = matches!(self.toks[self.pos - 1].tok, Tok::Forall);
                let mut binders = vec![self.binder()?];
                while self.eat(&Tok::Comma) {
                    binders.push(self.binder()?);
                }
                self.expect(Tok::Dot)?;
                let mut body = self.expr(0)?;
                for (name, ty) in binders.into_iter().rev() {
                    body = SNode {
                        kind: SKind::Quant(forall, name, ty, Box::new(body)),
                        start,
                        end: self.prev_end(),
                    };
                }
                Ok(body)
            }
            Tok::LParen => {
                let inner = self.nested()?;
                self.expect(Tok::RParen)?;
                Ok(SNode {
                    kind: inner.kind,
                    start,
                    end: self.prev_end(),
                })
            }
            Tok::EmptySet => self.empty_tail(start),
            Tok::LBrace => {
                if self.eat(&Tok::RBrace) {
                    return self.empty_tail(start);
                }
                let mut elems = vec![self.nested()?];
                while self.eat(&Tok::Comma) {
                    elems.push(self.nested()?);
                }
                self.expect(Tok::RBrace)?;
                Ok(node(self, SKind::Enum(elems)))
            }
            Tok::Ident(name) => {
                if KEYWORDS.contains(&name.as_str())
                    && !matches!(name.as_str(), "card" | "dom" | "ran" | "finite" | "functional")
                {
                    self.pos = at;
                    return Err(self.error_here(format!("unexpected keyword `{name}`")));
                }
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        args.push(self.nested()?);
                        while self.eat(&Tok::Comma) {
                            args.push(self.nested()?);
                        }
                        self.expect(Tok::RParen)?;
                    }
                    Ok(node(self, SKind::Call(name, args)))
                } else {
                    Ok(node(self, SKind::Ident(name)))
                }
            }
            t => {
                self.pos = at;
                Err(self.error_here(format!("expected an expression, found {t}")))
            }
        }
    }

    fn nested(&mut self) -> Result<SNode, ParseError> {
        let saved = std::mem::replace(&mut self.colon_sep, false);
        let r = self.expr(0);
        self.colon_sep = saved;
        r
    }

    fn empty_tail(&mut self, start: usize) -> Result<SNode, ParseError> {
        let ty = if self.eat(&Tok::Oftype) {
            Some(self.ty()?)
        } else {
            None
        };
        Ok(SNode {
            kind: SKind::Empty(ty),
            start,
            end: self.prev_end(),
        })
    }

    fn binder(&mut self) -> Result<(String, Type), ParseError> {
        let name = self.ident()?;
        if !(self.eat(&Tok::Colon) || self.eat(&Tok::Mem)) {
            return Err(self.error_here(format!("expected `:` and a type after binder `{name}`")));
        }
        let ty = self.ty()?;
        Ok((name, ty))
    }

    pub fn formula(&mut self, sig: &Signature) -> Result<Formula, ParseError> {
        let n = self.expr(0)?;
        Elab::new(sig, self.src).formula(&n)
    }

    /// A formula that may not use a top-level `:` as membership, for
    /// contexts where `:` is a separator (rule cases).
    pub fn formula_before_colon(&mut self, sig: &Signature) -> Result<Formula, ParseError> {
        self.colon_sep = true;
        let n = self.expr(0);
        self.colon_sep = false;
        Elab::new(sig, self.src).formula(&n?)
    }

    pub fn term(&mut self, sig: &Signature) -> Result<Term, ParseError> {
        let n = self.expr(0)?;
        Elab::new(sig, self.src).term(&n, None)
    }

    /// A term with a known expected type (lets `{}` stand alone).
    pub fn term_of(&mut self, sig: &Signature, expected: Option<&Type>) -> Result<Term, ParseError> {
        let n = self.expr(0)?;
        Elab::new(sig, self.src).term(&n, expected)
    }
}

fn binop_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Eq => "`=`",
        BinOp::Neq => "`/=`",
        BinOp::Lt => "`<`",
        BinOp::Le => "`<=`",
        BinOp::Gt => "`>`",
        BinOp::Ge => "`>=`",
        BinOp::Mem => "`:`",
        BinOp::NotMem => "`/:`",
        BinOp::Subset => "`<:`",
        BinOp::Range => "`..`",
        _ => "operator",
    }
}

struct Elab<'a> {
    sig: &'a Signature,
    src: &'a str,
    scope: Vec<Var>,
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, src: &'a str) -> Self {
        Elab {
            sig,
            src,
            scope: Vec::new(),
        }
    }

    fn type_error(&self, n: &SNode, msg: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.src, n.start);
        ParseError::Type {
            line,
            col,
            subterm: self.src[n.start..n.end.max(n.start)].trim().to_string(),
            msg: msg.into(),
        }
    }

    fn check_type(&self, n: &SNode, ty: &Type) -> Result<(), ParseError> {
        self.sig.check_type(ty).map_err(|m| self.type_error(n, m))
    }

    fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(v) = self.scope.iter().rev().find(|v| v.name == name) {
            return Some(v.clone());
        }
        self.sig
            .variables
            .get(name)
            .map(|t| Var::new(name, t.clone()))
    }

    fn formula(&mut self, n: &SNode) -> Result<Formula, ParseError> {
        match &n.kind {
            SKind::True => Ok(Formula::True),
            SKind::False => Ok(Formula::False),
            SKind::Not(f) => Ok(Formula::not(self.formula(f)?)),
            SKind::Quant(forall, name, ty, body) => {
                self.check_type(n, ty)?;
                if self.scope.iter().any(|v| &v.name == name) {
                    return Err(self.type_error(n, format!("binder `{name}` shadows an enclosing binder")));
                }
                if self.sig.functions.contains_key(name)
                    || self.sig.sets.contains(name)
                    || KEYWORDS.contains(&name.as_str())
                {
                    return Err(self.type_error(n, format!("binder `{name}` shadows a declared name")));
                }
                let v = Var::new(name.clone(), ty.clone());
                self.scope.push(v.clone());
                let body = self.formula(body);
                self.scope.pop();
                let body = body?;
                Ok(if *forall {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                })
            }
            SKind::Bin(op, a, b) => match op {
                BinOp::And => Ok(Formula::and(self.formula(a)?, self.formula(b)?)),
                BinOp::Or => Ok(Formula::or(self.formula(a)?, self.formula(b)?)),
                BinOp::Implies => Ok(Formula::implies(self.formula(a)?, self.formula(b)?)),
                BinOp::Iff => Ok(Formula::iff(self.formula(a)?, self.formula(b)?)),
                BinOp::Eq | BinOp::Neq => {
                    let (ta, tb) = self.same_type_pair(a, b, None)?;
                    if ta.ty() != tb.ty() {
                        return Err(self.type_error(
                            n,
                            format!("cannot compare {} with {}", ta.ty(), tb.ty()),
                        ));
                    }
                    let eq = Formula::eq(ta, tb);
                    Ok(if *op == BinOp::Neq { Formula::not(eq) } else { eq })
                }
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                    let ta = self.term(a, Some(&Type::Int))?;
                    let tb = self.term(b, Some(&Type::Int))?;
                    let p = match op {
                        BinOp::Lt => Pred::Lt,
                        BinOp::Le => Pred::Le,
                        BinOp::Gt => Pred::Gt,
                        _ => Pred::Ge,
                    };
                    Ok(Formula::Pred(p, vec![ta, tb]))
                }
                BinOp::Mem | BinOp::NotMem => {
                    let (ta, tb) = if a.is_bare_empty() && !b.is_bare_empty() {
                        let tb = self.term(b, None)?;
                        let elem = tb
                            .ty()
                            .elem()
                            .cloned()
                            .ok_or_else(|| self.type_error(b, format!("expected a set, found {}", tb.ty())))?;
                        (self.term(a, Some(&elem))?, tb)
                    } else {
                        let ta = self.term(a, None)?;
                        let tb = self.term(b, Some(&Type::pow(ta.ty().clone())))?;
                        (ta, tb)
                    };
                    let m = Formula::Pred(Pred::Mem, vec![ta, tb]);
                    Ok(if *op == BinOp::NotMem { Formula::not(m) } else { m })
                }
                BinOp::Subset => {
                    let (ta, tb) = self.same_type_pair(a, b, None)?;
                    Pred::Subset
                        .check_args(&[ta.ty(), tb.ty()])
                        .map_err(|m| self.type_error(n, m))?;
                    Ok(Formula::Pred(Pred::Subset, vec![ta, tb]))
                }
                _ => Err(self.type_error(n, "expected a formula, found a term")),
            },
            SKind::Call(name, args) if name == "finite" || name == "functional" => {
                if args.len() != 1 {
                    return Err(self.type_error(n, format!("{name} expects one argument")));
                }
                let t = self.term(&args[0], None)?;
                let p = if name == "finite" { Pred::Finite } else { Pred::Functional };
                p.check_args(&[t.ty()]).map_err(|m| self.type_error(n, m))?;
                Ok(Formula::Pred(p, vec![t]))
            }
            _ => Err(self.type_error(n, "expected a formula, found a term")),
        }
    }

    /// Elaborates two operands that must share a type, letting a bare `{}`
    /// take its type from the other side.
    fn same_type_pair(
        &mut self,
        a: &SNode,
        b: &SNode,
        expected: Option<&Type>,
    ) -> Result<(Term, Term), ParseError> {
        if a.is_bare_empty() && !b.is_bare_empty() {
            let tb = self.term(b, expected)?;
            let ta = self.term(a, Some(tb.ty()))?;
            Ok((ta, tb))
        } else {
            let ta = self.term(a, expected)?;
            let tb = self.term(b, Some(ta.ty()))?;
            Ok((ta, tb))
        }
    }

    fn term(&mut self, n: &SNode, expected: Option<&Type>) -> Result<Term, ParseError> {
        let t = self.term_inner(n, expected)?;
        if let Some(e) = expected {
            if t.ty() != e {
                return Err(self.type_error(n, format!("expected {e}, found {}", t.ty())));
            }
        }
        Ok(t)
    }

    fn app(&self, n: &SNode, op: Op, args: Vec<Term>) -> Result<Term, ParseError> {
        Term::app(op, args).map_err(|m| self.type_error(n, m))
    }

    fn term_inner(&mut self, n: &SNode, expected: Option<&Type>) -> Result<Term, ParseError> {
        match &n.kind {
            SKind::Ident(name) => match self.lookup(name) {
                Some(v) => Ok(Term::Var(v)),
                None if self.sig.functions.contains_key(name) => {
                    Err(self.type_error(n, format!("function `{name}` needs arguments")))
                }
                None => Err(self.type_error(n, format!("unknown identifier `{name}`"))),
            },
            SKind::Int(i) => Ok(Term::Int(i.clone())),
            SKind::Empty(Some(ty)) => {
                self.check_type(n, ty)?;
                match ty.elem() {
                    Some(e) => Ok(Term::empty(e.clone())),
                    None => Err(self.type_error(n, format!("the empty set cannot have type {ty}"))),
                }
            }
            SKind::Empty(None) => match expected {
                Some(Type::Pow(e)) => Ok(Term::empty((**e).clone())),
                Some(other) => Err(self.type_error(n, format!("expected {other}, found a set"))),
                None => Err(self.type_error(
                    n,
                    "cannot infer the type of `{}`; annotate it with `oftype`",
                )),
            },
            SKind::Enum(elems) => {
                let elem_expected = expected.and_then(Type::elem);
                let anchor = elems.iter().position(|e| !e.is_bare_empty());
                let mut out: Vec<Option<Term>> = vec![None; elems.len()];
                let elem_ty = match anchor {
                    Some(i) => {
                        let t = self.term(&elems[i], elem_expected)?;
                        let ty = t.ty().clone();
                        out[i] = Some(t);
                        Some(ty)
                    }
                    None => elem_expected.cloned(),
                };
                for (i, e) in elems.iter().enumerate() {
                    if out[i].is_none() {
                        out[i] = Some(self.term(e, elem_ty.as_ref())?);
                    }
                }
                let args = out.into_iter().map(|t| t.expect("filled")).collect();
                self.app(n, Op::Enum, args)
            }
            SKind::Call(name, args) => self.call(n, name, args),
            SKind::Apply(f, x) => {
                let tf = self.term(f, None)?;
                let dom = tf
                    .ty()
                    .as_relation()
                    .map(|(a, _)| a.clone())
                    .ok_or_else(|| self.type_error(f, format!("cannot apply a value of type {}", tf.ty())))?;
                let tx = self.term(x, Some(&dom))?;
                self.app(n, Op::Apply, vec![tf, tx])
            }
            SKind::Bin(op, a, b) => {
                let arith = |op| -> Option<Op> {
                    Some(match op {
                        BinOp::Add => Op::Add,
                        BinOp::Sub => Op::Sub,
                        BinOp::Mul => Op::Mul,
                        BinOp::Div => Op::Div,
                        BinOp::Range => Op::Range,
                        _ => return None,
                    })
                };
                if let Some(o) = arith(*op) {
                    let ta = self.term(a, Some(&Type::Int))?;
                    let tb = self.term(b, Some(&Type::Int))?;
                    return self.app(n, o, vec![ta, tb]);
                }
                let setop = match op {
                    BinOp::Union => Some(Op::Union),
                    BinOp::Inter => Some(Op::Inter),
                    BinOp::Diff => Some(Op::Diff),
                    BinOp::Ovl => Some(Op::Ovl),
                    _ => None,
                };
                if let Some(o) = setop {
                    let (ta, tb) = if a.is_bare_empty() && b.is_bare_empty() {
                        (self.term(a, expected)?, self.term(b, expected)?)
                    } else {
                        self.same_type_pair(a, b, expected)?
                    };
                    return self.app(n, o, vec![ta, tb]);
                }
                if *op == BinOp::Maplet {
                    let (ea, eb) = match expected {
                        Some(Type::Prod(x, y)) => (Some(&**x), Some(&**y)),
                        _ => (None, None),
                    };
                    let ta = self.term(a, ea)?;
                    let tb = self.term(b, eb)?;
                    return self.app(n, Op::Maplet, vec![ta, tb]);
                }
                Err(self.type_error(n, "expected a term, found a formula"))
            }
            SKind::Not(_) | SKind::Quant(..) | SKind::True | SKind::False => {
                Err(self.type_error(n, "expected a term, found a formula"))
            }
        }
    }

    fn call(&mut self, n: &SNode, name: &str, args: &[SNode]) -> Result<Term, ParseError> {
        let one = |this: &Self| {
            if args.len() == 1 {
                Ok(())
            } else {
                Err(this.type_error(n, format!("{name} expects one argument")))
            }
        };
        match name {
            "card" | "dom" | "ran" => {
                one(self)?;
                let t = self.term(&args[0], None)?;
                let op = match name {
                    "card" => Op::Card,
                    "dom" => Op::Dom,
                    _ => Op::Ran,
                };
                self.app(n, op, vec![t])
            }
            "finite" | "functional" => Err(self.type_error(n, "expected a term, found a formula")),
            _ => {
                if let Some(f) = self.sig.functions.get(name).cloned() {
                    if args.len() != f.params.len() {
                        return Err(self.type_error(
                            n,
                            format!("{name} expects {} arguments, got {}", f.params.len(), args.len()),
                        ));
                    }
                    let mut targs = Vec::new();
                    for (p, a) in f.params.iter().zip(args) {
                        targs.push(self.term(a, Some(&p.ty))?);
                    }
                    return self.app(n, Op::User(f), targs);
                }
                if let Some(v) = self.lookup(name) {
                    one(self)?;
                    let dom = v.ty.as_relation().map(|(a, _)| a.clone()).ok_or_else(|| {
                        self.type_error(n, format!("cannot apply `{name}` of type {}", v.ty))
                    })?;
                    let tx = self.term(&args[0], Some(&dom))?;
                    return self.app(n, Op::Apply, vec![Term::Var(v), tx]);
                }
                Err(self.type_error(n, format!("unknown function `{name}`")))
            }
        }
    }
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula(sig)?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term(sig)?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_type(text: &str, sig: &Signature) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect_end()?;
    sig.check_type(&t).map_err(|msg| ParseError::Type {
        line: 1,
        col: 1,
        subterm: text.trim().to_string(),
        msg,
    })?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Position, PositionError, SubstError, Substitution};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_set("S").unwrap();
        for (n, t) in [
            ("x", Type::Int),
            ("y", Type::Int),
            ("i", Type::Int),
            ("j", Type::Int),
            ("s", Type::pow(Type::Int)),
            ("f", Type::relation(Type::Int, Type::Int)),
            ("g", Type::relation(Type::Int, Type::Int)),
            ("p", Type::prod(Type::pow(Type::Int), Type::Given("S".into()))),
        ] {
            s.add_variable(n, t).unwrap();
        }
        s
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &sig()).unwrap_or_else(|e| panic!("{text}: {e}"))
    }

    #[test]
    fn card_range() {
        let got = f("card(1..3) = 3");
        let range = Term::mk(Op::Range, vec![Term::int(1), Term::int(3)]);
        let want = Formula::eq(Term::mk(Op::Card, vec![range]), Term::int(3));
        assert_eq!(got, want);
    }

    #[test]
    fn dangling_conjunction_is_syntax_error() {
        assert!(matches!(
            parse_formula("x = x ∧", &sig()),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn int_vs_set_is_type_error() {
        match parse_formula("1 = ∅", &sig()) {
            Err(ParseError::Type { subterm, .. }) => assert_eq!(subterm, "∅"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_locations() {
        match parse_formula("x = 1 &\n  y = ", &sig()) {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 7)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unicode_and_ascii_agree() {
        assert_eq!(
            f("∀z:ℤ·z ∈ s ⇒ z ≥ 0 ∨ ¬(z = y)"),
            f("!z:INT. z : s => z >= 0 or not(z = y)")
        );
        assert_eq!(f("∃z:ℤ·z ∉ s"), f("#z:INT. z /: s"));
    }

    #[test]
    fn precedence() {
        assert_eq!(f("x = 1 & y = 2 or x = 3"), f("(x = 1 & y = 2) or x = 3"));
        assert_eq!(f("x = 1 => y = 2 => x = 3"), f("x = 1 => (y = 2 => x = 3)"));
        assert_eq!(f("x + y * 2 = 1 - 2 - 3"), f("x + (y * 2) = (1 - 2) - 3"));
        assert_eq!(f("not x = 1 & y = 2"), f("(not x = 1) & y = 2"));
    }

    #[test]
    fn relations_do_not_chain() {
        assert!(parse_formula("x = y = x", &sig()).is_err());
        assert!(parse_formula("x < y < 3", &sig()).is_err());
    }

    #[test]
    fn empty_set_typing() {
        assert_eq!(f("{} = s"), f("{} oftype POW(INT) = s"));
        assert!(parse_formula("{} = {}", &sig()).is_err());
        assert!(parse_formula("{} oftype POW(INT) = {}", &sig()).is_ok());
        let t = parse_term("f ovl {1 |-> 2}", &sig()).unwrap();
        assert_eq!(t.ty(), &Type::relation(Type::Int, Type::Int));
        assert_eq!(f("{{}, s} = {s}").to_string(), "{{}, s} = {s}");
    }

    #[test]
    fn application_forms() {
        assert_eq!(f("f(1) = 2"), f("(f)(1) = 2"));
        let t = parse_term("(f ovl {1 |-> 5})(2)", &sig()).unwrap();
        assert_eq!(t.to_string(), "(f ovl {1 |-> 5})(2)");
        assert!(parse_formula("x(1) = 2", &sig()).is_err());
    }

    #[test]
    fn shadowing_rejected() {
        assert!(parse_formula("!z:INT. #z:INT. z = 1", &sig()).is_err());
        let f = parse_formula("x = 2 & (!x:INT. x = 1)", &sig()).unwrap();
        assert_eq!(f.free_vars().len(), 1);
        assert!(parse_formula("(!z:INT. z = 1) & (!z:INT. z = 2)", &sig()).is_ok());
    }

    #[test]
    fn product_types() {
        assert_eq!(
            parse_type("POW(INT) ** S", &sig()).unwrap(),
            Type::prod(Type::pow(Type::Int), Type::Given("S".into()))
        );
        assert!(parse_type("POW(T)", &sig()).is_err());
    }

    #[test]
    fn negative_literals() {
        assert_eq!(parse_term("-3", &sig()).unwrap(), Term::int(-3));
        assert_eq!(f("x - -3 = 1").to_string(), "x - -3 = 1");
        assert!(parse_term("-x", &sig()).is_err());
    }

    #[test]
    fn printing_is_canonical() {
        let cases = [
            "x = 1 & y = 2 or x = 3",
            "(x = 1 or y = 2) & x = 3",
            "x = 1 => y = 2 => x = 3",
            "(x = 1 => y = 2) => x = 3",
            "not (x = 1 & y = 2)",
            "x /= 1",
            "x /: s",
            "not x /= 1",
            "!z:INT. z : s => (#w:INT. w = z)",
            "(!z:INT. z = z) & x = 1",
            "card(i..j) = j - i + 1",
            "x - (y - 1) = x / (y * 2)",
            "{} \\/ {} = s",
            "card({} oftype POW(INT)) = 0",
            "{{} oftype POW(INT)} /= {} oftype POW(POW(INT))",
            "dom(f ovl g) <: s",
            "finite(s) & functional(f)",
            "1 |-> 2 : f",
            "p = s |-> p(s)",
        ];
        let mut sg = sig();
        sg.add_variable("q", Type::prod(Type::pow(Type::Int), Type::Given("S".into()))).unwrap();
        for c in cases {
            let c = c.replace("p(s)", "x");
            if c.starts_with("p =") {
                continue;
            }
            let g = f(&c);
            assert_eq!(g.to_string(), c, "printing {c}");
            assert_eq!(f(&g.to_string()), g);
        }
    }

    #[test]
    fn free_vars_examples() {
        let mut sg = sig();
        sg.add_variable("w", Type::Int).unwrap();
        let g = parse_formula("!z:INT. z = y", &sg).unwrap();
        assert_eq!(g.free_vars().into_iter().collect::<Vec<_>>(), vec!["y"]);
        let t = parse_term("card(i..j)", &sg).unwrap();
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["i", "j"]);
        assert!(Formula::False.free_vars().is_empty());
    }

    #[test]
    fn positions() {
        let g = f("x = 1 & card(1..2) = 2");
        let at = g.subterm_at(&Position(vec![2, 1])).unwrap().to_owned();
        assert_eq!(at.to_string(), "card(1..2)");
        assert_eq!(g.subterm_at(&Position::root()).unwrap().to_owned(), g.clone().into());
        assert!(f("x = 1").subterm_at(&Position(vec![3])).is_err());
        let y = Term::var("y", Type::Int);
        assert_eq!(f("x = 1").replace_at(&Position(vec![1]), y.into()).unwrap(), f("y = 1"));
        assert!(matches!(
            f("x = 1").replace_at(&Position(vec![1]), Formula::False.into()),
            Err(PositionError::Category { .. })
        ));
        let h = f("card(1..2) = 2");
        let ps = h.term_positions();
        assert_eq!(ps.len(), 5);
        assert_eq!(ps[1].0, Position(vec![1, 1]));
        assert_eq!(f("x = 1").term_positions().len(), 2);
        assert!(Formula::False.term_positions().is_empty());
    }

    #[test]
    fn substitution_examples() {
        let i = Var::new("i", Type::Int);
        let j = Var::new("j", Type::Int);
        let x = Var::new("x", Type::Int);
        let y = Var::new("y", Type::Int);
        let s = Substitution::from_pairs([(i, Term::int(2)), (j, Term::int(5))]).unwrap();
        let t = parse_term("card(i..j)", &sig()).unwrap();
        assert_eq!(s.apply_term(&t).to_string(), "card(2..5)");
        assert_eq!(Substitution::new().apply_term(&t), t);

        let mut sg = Signature::new();
        sg.add_variable("x", Type::Int).unwrap();
        let g = parse_formula("!y:INT. x = y", &sg).unwrap();
        let cap = Substitution::from_pairs([(x.clone(), Term::Var(y.clone()))]).unwrap();
        assert!(matches!(cap.apply_formula(&g), Err(SubstError::Capture { .. })));

        let y1 = Term::mk(Op::Add, vec![Term::Var(y.clone()), Term::int(1)]);
        let x1 = Term::mk(Op::Add, vec![Term::Var(x.clone()), Term::int(1)]);
        assert!(Substitution::from_pairs([(x.clone(), y1)]).unwrap().is_non_conflicting());
        assert!(!Substitution::from_pairs([(x.clone(), x1)]).unwrap().is_non_conflicting());
        let s = Substitution::from_pairs([(x.clone(), Term::Var(y.clone())), (y, Term::int(3))]).unwrap();
        assert!(!s.is_non_conflicting());
        let id = Substitution::from_pairs([(x.clone(), Term::Var(x))]).unwrap();
        assert!(id.is_empty());
    }
}
