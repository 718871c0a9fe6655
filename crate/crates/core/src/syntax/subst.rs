use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{Expr, Formula, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substituting into `{var}` would capture it under the binder `{binder}`")]
    Capture { binder: String, var: String },
    #[error("cannot bind `{var}` of type {expected} to a term of type {found}")]
    Type {
        var: String,
        expected: String,
        found: String,
    },
}

/// Finite variable-to-term mapping. Identity bindings are never stored, so
/// the key set is exactly `Dom(σ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Result<Self, SubstError> {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            s.bind(&v, t)?;
        }
        Ok(s)
    }

    pub fn bind(&mut self, var: &Var, t: Term) -> Result<(), SubstError> {
        if *t.ty() != var.ty {
            return Err(SubstError::Type {
                var: var.name.clone(),
                expected: var.ty.to_string(),
                found: t.ty().to_string(),
            });
        }
        if matches!(&t, Term::Var(v) if v.name == var.name) {
            self.map.remove(&var.name);
        } else {
            self.map.insert(var.name.clone(), t);
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.map.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn dom(&self) -> BTreeSet<String> {
        self.map.keys().cloned().collect()
    }

    pub fn ran(&self) -> Vec<&Term> {
        self.map.values().collect()
    }

    /// `⋃ Var(t)` over the range.
    pub fn range_vars(&self) -> BTreeSet<String> {
        self.map.values().flat_map(Term::free_vars).collect()
    }

    /// No range variable is also in the domain.
    pub fn is_non_conflicting(&self) -> bool {
        self.range_vars().is_disjoint(&self.dom())
    }

    pub fn without(&self, name: &str) -> Substitution {
        let mut s = self.clone();
        s.map.remove(name);
        s
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
            Term::Int(_) => t.clone(),
            Term::App { op, args, ty } => Term::App {
                op: op.clone(),
                args: args.iter().map(|a| self.apply_term(a)).collect(),
                ty: ty.clone(),
            },
        }
    }

    /// Simultaneous replacement of free occurrences. Binders in the domain
    /// stop the substitution; a binder that would capture a range variable
    /// is an error.
    pub fn apply_formula(&self, f: &Formula) -> Result<Formula, SubstError> {
        if self.map.is_empty() {
            return Ok(f.clone());
        }
        let bin = |a: &Formula, b: &Formula| -> Result<(Box<Formula>, Box<Formula>), SubstError> {
            Ok((Box::new(self.apply_formula(a)?), Box::new(self.apply_formula(b)?)))
        };
        Ok(match f {
            Formula::False | Formula::True => f.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(*p, args.iter().map(|a| self.apply_term(a)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(self.apply_term(a), self.apply_term(b)),
            Formula::Not(g) => Formula::Not(Box::new(self.apply_formula(g)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::Iff(a, b)
            }
            Formula::Forall(v, body) => Formula::Forall(v.clone(), Box::new(self.under(v, body)?)),
            Formula::Exists(v, body) => Formula::Exists(v.clone(), Box::new(self.under(v, body)?)),
        })
    }

    fn under(&self, binder: &Var, body: &Formula) -> Result<Formula, SubstError> {
        let inner = self.without(&binder.name);
        for y in body.free_vars() {
            if let Some(t) = inner.map.get(&y) {
                if t.free_vars().contains(&binder.name) {
                    return Err(SubstError::Capture {
                        binder: binder.name.clone(),
                        var: y,
                    });
                }
            }
        }
        inner.apply_formula(body)
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr, SubstError> {
        match e {
            Expr::Formula(f) => self.apply_formula(f).map(Expr::Formula),
            Expr::Term(t) => Ok(Expr::Term(self.apply_term(t))),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} := {v}")?;
        }
        write!(f, "}}")
    }
}
