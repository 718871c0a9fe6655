use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{Expr, Formula, Node, Term};

/// Path from the root to a node; children are numbered from 1.
///
/// Numbering: `And`/`Or`/`Implies`/`Iff`/`Eq` have two children, `Not` one,
/// a quantifier's body is child 1, predicate and function applications are
/// numbered by argument index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "root" || s == "ε" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|p| match p.parse::<usize>() {
                Ok(0) | Err(_) => Err(format!("invalid position `{s}`")),
                Ok(i) => Ok(i),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("invalid position {0}")]
    Invalid(Position),
    #[error("category mismatch at {pos}: expected a {expected}")]
    Category { pos: Position, expected: &'static str },
    #[error("type mismatch at {pos}: expected {expected}, got {found}")]
    Type {
        pos: Position,
        expected: String,
        found: String,
    },
}

impl Formula {
    /// The i-th child (1-based).
    pub fn child(&self, i: usize) -> Option<Node<'_>> {
        match (self, i) {
            (Formula::Pred(_, args), _) if i >= 1 => args.get(i - 1).map(Node::Term),
            (Formula::Eq(a, _), 1) => Some(Node::Term(a)),
            (Formula::Eq(_, b), 2) => Some(Node::Term(b)),
            (Formula::Not(f), 1) => Some(Node::Formula(f)),
            (Formula::And(a, _), 1)
            | (Formula::Or(a, _), 1)
            | (Formula::Implies(a, _), 1)
            | (Formula::Iff(a, _), 1) => Some(Node::Formula(a)),
            (Formula::And(_, b), 2)
            | (Formula::Or(_, b), 2)
            | (Formula::Implies(_, b), 2)
            | (Formula::Iff(_, b), 2) => Some(Node::Formula(b)),
            (Formula::Forall(_, f), 1) | (Formula::Exists(_, f), 1) => Some(Node::Formula(f)),
            _ => None,
        }
    }

    pub fn subterm_at(&self, p: &Position) -> Result<Node<'_>, PositionError> {
        Node::Formula(self).at(p)
    }

    pub fn replace_at(&self, p: &Position, s: Expr) -> Result<Formula, PositionError> {
        self.replace_from(p, 0, s)
    }

    fn replace_from(&self, p: &Position, depth: usize, s: Expr) -> Result<Formula, PositionError> {
        let Some(&i) = p.0.get(depth) else {
            return match s {
                Expr::Formula(f) => Ok(f),
                Expr::Term(_) => Err(PositionError::Category {
                    pos: p.clone(),
                    expected: "formula",
                }),
            };
        };
        let invalid = || PositionError::Invalid(p.clone());
        let rec = |f: &Formula, s| f.replace_from(p, depth + 1, s).map(Box::new);
        let rec_t = |t: &Term, s| t.replace_from(p, depth + 1, s);
        Ok(match (self, i) {
            (Formula::Pred(q, args), _) if i >= 1 && i <= args.len() => {
                let mut args = args.clone();
                args[i - 1] = rec_t(&args[i - 1], s)?;
                Formula::Pred(*q, args)
            }
            (Formula::Eq(a, b), 1) => Formula::Eq(rec_t(a, s)?, b.clone()),
            (Formula::Eq(a, b), 2) => Formula::Eq(a.clone(), rec_t(b, s)?),
            (Formula::Not(f), 1) => Formula::Not(rec(f, s)?),
            (Formula::And(a, b), 1) => Formula::And(rec(a, s)?, b.clone()),
            (Formula::And(a, b), 2) => Formula::And(a.clone(), rec(b, s)?),
            (Formula::Or(a, b), 1) => Formula::Or(rec(a, s)?, b.clone()),
            (Formula::Or(a, b), 2) => Formula::Or(a.clone(), rec(b, s)?),
            (Formula::Implies(a, b), 1) => Formula::Implies(rec(a, s)?, b.clone()),
            (Formula::Implies(a, b), 2) => Formula::Implies(a.clone(), rec(b, s)?),
            (Formula::Iff(a, b), 1) => Formula::Iff(rec(a, s)?, b.clone()),
            (Formula::Iff(a, b), 2) => Formula::Iff(a.clone(), rec(b, s)?),
            (Formula::Forall(v, f), 1) => Formula::Forall(v.clone(), rec(f, s)?),
            (Formula::Exists(v, f), 1) => Formula::Exists(v.clone(), rec(f, s)?),
            _ => return Err(invalid()),
        })
    }

    /// All positions addressing terms, depth-first, left to right.
    pub fn term_positions(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        self.walk_terms(&Position::root(), &mut out);
        out
    }

    fn walk_terms<'a>(&'a self, here: &Position, out: &mut Vec<(Position, &'a Term)>) {
        let mut i = 1;
        while let Some(child) = self.child(i) {
            let p = here.child(i);
            match child {
                Node::Formula(f) => f.walk_terms(&p, out),
                Node::Term(t) => t.walk(&p, out),
            }
            i += 1;
        }
    }
}

impl Term {
    pub fn child(&self, i: usize) -> Option<&Term> {
        if i == 0 {
            return None;
        }
        self.args().get(i - 1)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term, PositionError> {
        let mut cur = self;
        for &i in &p.0 {
            cur = cur.child(i).ok_or_else(|| PositionError::Invalid(p.clone()))?;
        }
        Ok(cur)
    }

    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, PositionError> {
        self.replace_from(p, 0, Expr::Term(s))
    }

    fn replace_from(&self, p: &Position, depth: usize, s: Expr) -> Result<Term, PositionError> {
        let Some(&i) = p.0.get(depth) else {
            return match s {
                Expr::Term(t) if t.ty() == self.ty() => Ok(t),
                Expr::Term(t) => Err(PositionError::Type {
                    pos: p.clone(),
                    expected: self.ty().to_string(),
                    found: t.ty().to_string(),
                }),
                Expr::Formula(_) => Err(PositionError::Category {
                    pos: p.clone(),
                    expected: "term",
                }),
            };
        };
        match self {
            Term::App { op, args, ty } if i >= 1 && i <= args.len() => {
                let mut args = args.clone();
                args[i - 1] = args[i - 1].replace_from(p, depth + 1, s)?;
                Ok(Term::App {
                    op: op.clone(),
                    args,
                    ty: ty.clone(),
                })
            }
            _ => Err(PositionError::Invalid(p.clone())),
        }
    }

    fn walk<'a>(&'a self, here: &Position, out: &mut Vec<(Position, &'a Term)>) {
        out.push((here.clone(), self));
        for (i, a) in self.args().iter().enumerate() {
            a.walk(&here.child(i + 1), out);
        }
    }
}

impl<'a> Node<'a> {
    pub fn at(self, p: &Position) -> Result<Node<'a>, PositionError> {
        let mut cur = self;
        for &i in &p.0 {
            cur = match cur {
                Node::Formula(f) => f.child(i),
                Node::Term(t) => t.child(i).map(Node::Term),
            }
            .ok_or_else(|| PositionError::Invalid(p.clone()))?;
        }
        Ok(cur)
    }
}

impl Expr {
    pub fn subterm_at(&self, p: &Position) -> Result<Node<'_>, PositionError> {
        match self {
            Expr::Formula(f) => f.subterm_at(p),
            Expr::Term(t) => t.subterm_at(p).map(Node::Term),
        }
    }

    pub fn replace_at(&self, p: &Position, s: Expr) -> Result<Expr, PositionError> {
        match self {
            Expr::Formula(f) => f.replace_at(p, s).map(Expr::Formula),
            Expr::Term(t) => t.replace_from(p, 0, s).map(Expr::Term),
        }
    }
}
