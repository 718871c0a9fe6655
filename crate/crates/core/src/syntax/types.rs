use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Types of the object language.
///
/// Formulas are not typed; `BOOL` only exists implicitly as the category of
/// formulas, so it has no constructor here.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Int,
    Given(String),
    Pow(Box<Type>),
    Prod(Box<Type>, Box<Type>),
}

impl Type {
    pub fn pow(elem: Type) -> Type {
        Type::Pow(Box::new(elem))
    }

    pub fn prod(left: Type, right: Type) -> Type {
        Type::Prod(Box::new(left), Box::new(right))
    }

    /// `POW(left ** right)`
    pub fn relation(left: Type, right: Type) -> Type {
        Type::pow(Type::prod(left, right))
    }

    /// Element type of a set type.
    pub fn elem(&self) -> Option<&Type> {
        match self {
            Type::Pow(t) => Some(t),
            _ => None,
        }
    }

    /// Source and target types of a relation type.
    pub fn as_relation(&self) -> Option<(&Type, &Type)> {
        match self.elem() {
            Some(Type::Prod(a, b)) => Some((a, b)),
            _ => None,
        }
    }

    /// Number of nested `POW` constructors along the deepest path.
    pub fn pow_depth(&self) -> usize {
        match self {
            Type::Int | Type::Given(_) => 0,
            Type::Pow(t) => 1 + t.pow_depth(),
            Type::Prod(a, b) => a.pow_depth().max(b.pow_depth()),
        }
    }

    pub fn given_sets(&self, out: &mut Vec<String>) {
        match self {
            Type::Int => {}
            Type::Given(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Type::Pow(t) => t.given_sets(out),
            Type::Prod(a, b) => {
                a.given_sets(out);
                b.given_sets(out);
            }
        }
    }

    /// Replaces given sets according to `map`; names not in the map are kept.
    pub fn instantiate(&self, map: &BTreeMap<String, Type>) -> Type {
        match self {
            Type::Int => Type::Int,
            Type::Given(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Type::Pow(t) => Type::pow(t.instantiate(map)),
            Type::Prod(a, b) => Type::prod(a.instantiate(map), b.instantiate(map)),
        }
    }

    /// One-way type matching: binds the given sets listed in `params`.
    pub fn match_with(
        &self,
        subject: &Type,
        params: &[String],
        bindings: &mut BTreeMap<String, Type>,
    ) -> bool {
        match (self, subject) {
            (Type::Given(n), _) if params.contains(n) => match bindings.get(n) {
                Some(bound) => bound == subject,
                None => {
                    bindings.insert(n.clone(), subject.clone());
                    true
                }
            },
            (Type::Int, Type::Int) => true,
            (Type::Given(a), Type::Given(b)) => a == b,
            (Type::Pow(a), Type::Pow(b)) => a.match_with(b, params, bindings),
            (Type::Prod(a1, b1), Type::Prod(a2, b2)) => {
                a1.match_with(a2, params, bindings) && b1.match_with(b2, params, bindings)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => write!(f, "INT"),
            Type::Given(n) => write!(f, "{n}"),
            Type::Pow(t) => write!(f, "POW({t})"),
            Type::Prod(a, b) => {
                write!(f, "{a} ** ")?;
                if matches!(**b, Type::Prod(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}
