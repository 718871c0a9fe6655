use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A value of the bounded semantics.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Value {
    Int(BigInt),
    /// The `index`-th element (from 1) of a given set's carrier.
    Elem { set: String, index: usize },
    Pair(Box<Value>, Box<Value>),
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Value {
        Value::Int(i.into())
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(items.into_iter().collect())
    }

    /// Builds a relation from `(a, b)` pairs.
    pub fn relation(pairs: impl IntoIterator<Item = (Value, Value)>) -> Value {
        Value::set(pairs.into_iter().map(|(a, b)| Value::pair(a, b)))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Elem { set, index } => write!(f, "{set}_{index}"),
            Value::Pair(a, b) => {
                write!(f, "{a} |-> ")?;
                if matches!(**b, Value::Pair(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Value::Set(items) => {
                write!(f, "{{")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriBool {
    T,
    F,
    /// Undefined.
    U,
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::T
        } else {
            TriBool::F
        }
    }

    pub fn not(self) -> TriBool {
        match self {
            TriBool::T => TriBool::F,
            TriBool::F => TriBool::T,
            TriBool::U => TriBool::U,
        }
    }

    pub fn and(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::F, _) | (_, TriBool::F) => TriBool::F,
            (TriBool::T, TriBool::T) => TriBool::T,
            _ => TriBool::U,
        }
    }

    pub fn or(self, other: TriBool) -> TriBool {
        self.not().and(other.not()).not()
    }

    pub fn is_true(self) -> bool {
        self == TriBool::T
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriBool::T => "T",
            TriBool::F => "F",
            TriBool::U => "⊥",
        })
    }
}
