//! Bounded finite-model semantics.
//!
//! Formulas are evaluated in Kleene's strong three-valued logic over finite
//! carriers; [`check_sequent`] searches all interpretations within
//! [`Bounds`] for a model that refutes a well-defined sequent.

mod check;
mod domain;
mod eval;
mod value;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Term};

pub use check::{check_sequent, replay, CheckResult, Checker};
pub use domain::{Cursor, Domain, DomainIter};
pub use eval::{Env, Evaluator};
pub use value::{TriBool, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unboundable value: {0}")]
    Unboundable(String),
    #[error("evaluation budget of {0} steps exhausted")]
    Budget(u64),
    #[error("variable `{0}` has no value")]
    Unassigned(String),
    #[error("function `{0}` has no body to evaluate")]
    NoBody(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub int_lo: i64,
    pub int_hi: i64,
    pub given_size: usize,
    /// Deepest `POW` nesting a variable's type may have.
    pub max_nesting: usize,
    /// Evaluation steps (visited assignments plus quantifier instances).
    pub budget: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            int_lo: -3,
            int_hi: 3,
            given_size: 3,
            max_nesting: 2,
            budget: 10_000_000,
        }
    }
}

impl Bounds {
    pub fn ints(lo: i64, hi: i64) -> Bounds {
        Bounds {
            int_lo: lo,
            int_hi: hi,
            ..Bounds::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.int_lo > self.int_hi {
            return Err(format!("empty integer range {}..{}", self.int_lo, self.int_hi));
        }
        if self.given_size == 0 || self.max_nesting == 0 {
            return Err("given-set size and nesting must be positive".into());
        }
        Ok(())
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "int {}..{}, given {}, nesting {}",
            self.int_lo, self.int_hi, self.given_size, self.max_nesting
        )
    }
}

/// A bounded model: carriers come from `bounds`, free variables from
/// `assignment`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub bounds: Bounds,
    pub assignment: IndexMap<String, Value>,
}

impl Interpretation {
    pub fn new(bounds: Bounds) -> Self {
        Interpretation {
            bounds,
            assignment: IndexMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, v: Value) -> Self {
        self.assignment.insert(name.into(), v);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.assignment.get(name)
    }

    pub fn env(&self) -> Env {
        self.assignment
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

pub fn eval_term(t: &Term, m: &Interpretation) -> Result<Option<Value>, EvalError> {
    Evaluator::new(&m.bounds).term(t, &mut m.env())
}

pub fn eval3(f: &Formula, m: &Interpretation) -> Result<TriBool, EvalError> {
    Evaluator::new(&m.bounds).formula(f, &mut m.env())
}

/// Two-valued reading: true iff `f` evaluates to T.
pub fn eval2(f: &Formula, m: &Interpretation) -> Result<bool, EvalError> {
    Ok(eval3(f, m)? == TriBool::T)
}
