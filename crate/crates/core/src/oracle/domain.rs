//! Finite carriers for types under [`Bounds`], with restartable cursors so
//! that enumeration is lazy.

use num_bigint::BigInt;
use num_traits::One;

use super::{Bounds, EvalError, Value};
use crate::syntax::Type;

/// Largest element domain whose subsets we are willing to enumerate.
const MAX_POW_BASE: usize = 4096;

#[derive(Debug)]
pub enum Domain {
    Int(BigInt, BigInt),
    Given(String, usize),
    Prod(Box<Domain>, Box<Domain>),
    /// Subsets of the listed elements, in bitmask order.
    Pow(Vec<Value>),
}

impl Domain {
    pub fn of(ty: &Type, bounds: &Bounds) -> Result<Domain, EvalError> {
        if ty.pow_depth() > bounds.max_nesting {
            return Err(EvalError::Unboundable(format!(
                "type {ty} nests POW deeper than {}",
                bounds.max_nesting
            )));
        }
        Ok(match ty {
            Type::Int => Domain::Int(bounds.int_lo.into(), bounds.int_hi.into()),
            Type::Given(s) => Domain::Given(s.clone(), bounds.given_size),
            Type::Prod(a, b) => Domain::Prod(
                Box::new(Domain::of(a, bounds)?),
                Box::new(Domain::of(b, bounds)?),
            ),
            Type::Pow(e) => {
                let inner = Domain::of(e, bounds)?;
                let mut elems = Vec::new();
                let mut c = inner.cursor();
                loop {
                    if elems.len() >= MAX_POW_BASE {
                        return Err(EvalError::Unboundable(format!(
                            "carrier of {e} is too large to enumerate subsets"
                        )));
                    }
                    elems.push(c.value(&inner));
                    if !c.advance(&inner) {
                        break;
                    }
                }
                Domain::Pow(elems)
            }
        })
    }

    pub fn cursor(&self) -> Cursor {
        match self {
            Domain::Int(lo, _) => Cursor::Int(lo.clone()),
            Domain::Given(..) => Cursor::Given(1),
            Domain::Prod(a, b) => Cursor::Prod(Box::new(a.cursor()), Box::new(b.cursor())),
            Domain::Pow(elems) => Cursor::Pow(vec![false; elems.len()]),
        }
    }

    /// Number of values, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        match self {
            Domain::Int(lo, hi) => {
                let n: BigInt = hi - lo + 1;
                u64::try_from(n).unwrap_or(u64::MAX)
            }
            Domain::Given(_, n) => *n as u64,
            Domain::Prod(a, b) => a.size().saturating_mul(b.size()),
            Domain::Pow(elems) => {
                if elems.len() >= 64 {
                    u64::MAX
                } else {
                    1u64 << elems.len()
                }
            }
        }
    }

    pub fn values(&self) -> DomainIter<'_> {
        DomainIter {
            dom: self,
            cur: Some(self.cursor()),
        }
    }
}

/// Position inside a [`Domain`].
#[derive(Clone, Debug)]
pub enum Cursor {
    Int(BigInt),
    Given(usize),
    Prod(Box<Cursor>, Box<Cursor>),
    Pow(Vec<bool>),
}

impl Cursor {
    pub fn value(&self, dom: &Domain) -> Value {
        match (self, dom) {
            (Cursor::Int(i), _) => Value::Int(i.clone()),
            (Cursor::Given(i), Domain::Given(s, _)) => Value::Elem {
                set: s.clone(),
                index: *i,
            },
            (Cursor::Prod(a, b), Domain::Prod(da, db)) => Value::pair(a.value(da), b.value(db)),
            (Cursor::Pow(bits), Domain::Pow(elems)) => Value::set(
                bits.iter()
                    .zip(elems)
                    .filter(|(b, _)| **b)
                    .map(|(_, v)| v.clone()),
            ),
            _ => unreachable!("cursor built from this domain"),
        }
    }

    /// Moves to the next value; returns false (and wraps to the first
    /// value) when the domain is exhausted.
    pub fn advance(&mut self, dom: &Domain) -> bool {
        match (self, dom) {
            (Cursor::Int(i), Domain::Int(lo, hi)) => {
                if &*i < hi {
                    *i += BigInt::one();
                    true
                } else {
                    *i = lo.clone();
                    false
                }
            }
            (Cursor::Given(i), Domain::Given(_, n)) => {
                if *i < *n {
                    *i += 1;
                    true
                } else {
                    *i = 1;
                    false
                }
            }
            (Cursor::Prod(a, b), Domain::Prod(da, db)) => b.advance(db) || a.advance(da),
            (Cursor::Pow(bits), _) => {
                for b in bits.iter_mut() {
                    if *b {
                        *b = false;
                    } else {
                        *b = true;
                        return true;
                    }
                }
                false
            }
            _ => unreachable!("cursor built from this domain"),
        }
    }
}

pub struct DomainIter<'a> {
    dom: &'a Domain,
    cur: Option<Cursor>,
}

impl Iterator for DomainIter<'_> {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        let c = self.cur.as_mut()?;
        let v = c.value(self.dom);
        if !c.advance(self.dom) {
            self.cur = None;
        }
        Some(v)
    }
}
