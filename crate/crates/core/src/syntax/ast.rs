use std::collections::BTreeSet;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::types::Type;

static INT_TYPE: Type = Type::Int;

/// A typed variable occurrence or binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub ty: Type,
}

impl Var {
    pub fn new(name: impl Into<String>, ty: Type) -> Self {
        Var {
            name: name.into(),
            ty,
        }
    }
}

/// A user-declared function symbol together with its domain condition.
///
/// `wd` is a formula over `params`; `body`, when present, gives the oracle a
/// way to evaluate applications inside the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionSymbol {
    pub name: String,
    pub params: Vec<Var>,
    pub result: Type,
    pub wd: Formula,
    pub body: Option<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Range,
    Card,
    /// Nullary; the node's type is the set type.
    Empty,
    /// Finite set enumeration `{a, b, ...}`.
    Enum,
    Union,
    Inter,
    Diff,
    Maplet,
    Dom,
    Ran,
    Ovl,
    /// `apply(f, x)`, printed `f(x)`.
    Apply,
    User(Arc<FunctionSymbol>),
}

impl Op {
    pub fn name(&self) -> &str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Range => "..",
            Op::Card => "card",
            Op::Empty => "{}",
            Op::Enum => "{..}",
            Op::Union => "\\/",
            Op::Inter => "/\\",
            Op::Diff => "\\",
            Op::Maplet => "|->",
            Op::Dom => "dom",
            Op::Ran => "ran",
            Op::Ovl => "ovl",
            Op::Apply => "apply",
            Op::User(f) => &f.name,
        }
    }

    /// Result type of the operator applied to arguments of the given types.
    /// `Empty` has no argument types to go on and is rejected here.
    pub fn result_type(&self, args: &[&Type]) -> Result<Type, String> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("{} expects {n} arguments, got {}", self.name(), args.len()))
            }
        };
        let int = |t: &Type| {
            if *t == Type::Int {
                Ok(())
            } else {
                Err(format!("{} expects INT operands, got {t}", self.name()))
            }
        };
        let set = |t: &Type| {
            t.elem()
                .cloned()
                .ok_or_else(|| format!("{} expects a set, got {t}", self.name()))
        };
        let rel = |t: &Type| {
            t.as_relation()
                .map(|(a, b)| (a.clone(), b.clone()))
                .ok_or_else(|| format!("{} expects a relation, got {t}", self.name()))
        };
        match self {
            Op::Add | Op::Sub | Op::Mul | Op::Div => {
                arity(2)?;
                int(args[0])?;
                int(args[1])?;
                Ok(Type::Int)
            }
            Op::Range => {
                arity(2)?;
                int(args[0])?;
                int(args[1])?;
                Ok(Type::pow(Type::Int))
            }
            Op::Card => {
                arity(1)?;
                set(args[0])?;
                Ok(Type::Int)
            }
            Op::Empty => Err("the empty set needs an explicit type".into()),
            Op::Enum => {
                let first = args
                    .first()
                    .ok_or_else(|| "set enumeration needs at least one element".to_string())?;
                for t in &args[1..] {
                    if t != first {
                        return Err(format!("set enumeration mixes {first} and {t}"));
                    }
                }
                Ok(Type::pow((*first).clone()))
            }
            Op::Union | Op::Inter | Op::Diff => {
                arity(2)?;
                set(args[0])?;
                if args[0] != args[1] {
                    return Err(format!(
                        "{} operands differ: {} and {}",
                        self.name(),
                        args[0],
                        args[1]
                    ));
                }
                Ok(args[0].clone())
            }
            Op::Ovl => {
                arity(2)?;
                rel(args[0])?;
                if args[0] != args[1] {
                    return Err(format!("ovl operands differ: {} and {}", args[0], args[1]));
                }
                Ok(args[0].clone())
            }
            Op::Maplet => {
                arity(2)?;
                Ok(Type::prod(args[0].clone(), args[1].clone()))
            }
            Op::Dom => {
                arity(1)?;
                Ok(Type::pow(rel(args[0])?.0))
            }
            Op::Ran => {
                arity(1)?;
                Ok(Type::pow(rel(args[0])?.1))
            }
            Op::Apply => {
                arity(2)?;
                let (a, b) = rel(args[0])?;
                if *args[1] != a {
                    return Err(format!("applying a function on {a} to an argument of type {}", args[1]));
                }
                Ok(b)
            }
            Op::User(f) => {
                arity(f.params.len())?;
                for (p, t) in f.params.iter().zip(args) {
                    if p.ty != **t {
                        return Err(format!(
                            "{} expects {} for parameter {}, got {t}",
                            f.name, p.ty, p.name
                        ));
                    }
                }
                Ok(f.result.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    Int(BigInt),
    App { op: Op, args: Vec<Term>, ty: Type },
}

impl Term {
    pub fn var(name: impl Into<String>, ty: Type) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn int(value: impl Into<BigInt>) -> Term {
        Term::Int(value.into())
    }

    /// The empty set of `POW(elem)`.
    pub fn empty(elem: Type) -> Term {
        Term::App {
            op: Op::Empty,
            args: vec![],
            ty: Type::pow(elem),
        }
    }

    /// Typed application; fails when the arguments do not fit the operator.
    pub fn app(op: Op, args: Vec<Term>) -> Result<Term, String> {
        let tys: Vec<&Type> = args.iter().map(Term::ty).collect();
        let ty = op.result_type(&tys)?;
        Ok(Term::App { op, args, ty })
    }

    /// Like [`Term::app`] for callers that already know the arguments fit.
    pub fn mk(op: Op, args: Vec<Term>) -> Term {
        Term::app(op, args).expect("ill-typed term construction")
    }

    pub fn ty(&self) -> &Type {
        match self {
            Term::Var(v) => &v.ty,
            Term::Int(_) => &INT_TYPE,
            Term::App { ty, .. } => ty,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App { args, .. } => args,
            _ => &[],
        }
    }

    /// Free variables; terms have no binders, so these are all variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = IndexMap::new();
        self.collect_vars(&mut out);
        out.into_keys().collect()
    }

    pub(crate) fn collect_vars(&self, out: &mut IndexMap<String, Type>) {
        match self {
            Term::Var(v) => {
                out.entry(v.name.clone()).or_insert_with(|| v.ty.clone());
            }
            Term::Int(_) => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Every function symbol occurring in the term.
    pub fn ops(&self, out: &mut Vec<Op>) {
        if let Term::App { op, args, .. } = self {
            if !out.contains(op) {
                out.push(op.clone());
            }
            args.iter().for_each(|a| a.ops(out));
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// Replaces given-set types throughout the term.
    pub fn instantiate_types(&self, map: &std::collections::BTreeMap<String, Type>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => Term::var(v.name.clone(), v.ty.instantiate(map)),
            Term::Int(_) => self.clone(),
            Term::App { op, args, ty } => Term::App {
                op: op.clone(),
                args: args.iter().map(|a| a.instantiate_types(map)).collect(),
                ty: ty.instantiate(map),
            },
        }
    }
}

/// Built-in predicate symbols. All of them are total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pred {
    Lt,
    Le,
    Gt,
    Ge,
    /// Membership, `x : s`.
    Mem,
    Subset,
    Finite,
    /// Global functionality of a relation.
    Functional,
}

impl Pred {
    pub fn arity(self) -> usize {
        match self {
            Pred::Finite | Pred::Functional => 1,
            _ => 2,
        }
    }

    pub fn check_args(self, args: &[&Type]) -> Result<(), String> {
        if args.len() != self.arity() {
            return Err(format!("{self:?} expects {} arguments", self.arity()));
        }
        match self {
            Pred::Lt | Pred::Le | Pred::Gt | Pred::Ge => {
                if *args[0] != Type::Int || *args[1] != Type::Int {
                    return Err(format!(
                        "comparison expects INT operands, got {} and {}",
                        args[0], args[1]
                    ));
                }
            }
            Pred::Mem => {
                if args[1].elem() != Some(args[0]) {
                    return Err(format!("membership of {} in {}", args[0], args[1]));
                }
            }
            Pred::Subset => {
                if args[0].elem().is_none() || args[0] != args[1] {
                    return Err(format!("inclusion between {} and {}", args[0], args[1]));
                }
            }
            Pred::Finite => {
                if args[0].elem().is_none() {
                    return Err(format!("finite expects a set, got {}", args[0]));
                }
            }
            Pred::Functional => {
                if args[0].as_relation().is_none() {
                    return Err(format!("functional expects a relation, got {}", args[0]));
                }
            }
        }
        Ok(())
    }
}

/// Formulas. `True`, `Or`, `Implies`, `Iff` and `Exists` are derived
/// connectives kept as nodes for readable output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    False,
    True,
    Pred(Pred, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn pred(p: Pred, args: Vec<Term>) -> Formula {
        debug_assert!(p.check_args(&args.iter().map(Term::ty).collect::<Vec<_>>()).is_ok());
        Formula::Pred(p, args)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        debug_assert_eq!(a.ty(), b.ty());
        Formula::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_var_decls().into_keys().collect()
    }

    /// Free variables with their types, in order of first occurrence.
    pub fn free_var_decls(&self) -> IndexMap<String, Type> {
        let mut out = IndexMap::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut IndexMap<String, Type>) {
        match self {
            Formula::False | Formula::True => {}
            Formula::Pred(_, args) => {
                for a in args {
                    collect_term_free(a, bound, out);
                }
            }
            Formula::Eq(a, b) => {
                collect_term_free(a, bound, out);
                collect_term_free(b, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names of all variables, free or bound.
    pub fn all_var_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::False | Formula::True => {}
            Formula::Pred(_, args) => args.iter().for_each(|a| {
                out.extend(a.free_vars());
            }),
            Formula::Eq(a, b) => {
                out.extend(a.free_vars());
                out.extend(b.free_vars());
            }
            Formula::Not(f) => f.all_var_names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.all_var_names(out);
                b.all_var_names(out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                out.insert(v.name.clone());
                body.all_var_names(out);
            }
        }
    }

    /// Every function symbol occurring in the formula.
    pub fn ops(&self, out: &mut Vec<Op>) {
        match self {
            Formula::False | Formula::True => {}
            Formula::Pred(_, args) => args.iter().for_each(|a| a.ops(out)),
            Formula::Eq(a, b) => {
                a.ops(out);
                b.ops(out);
            }
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.ops(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.ops(out);
                b.ops(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::False | Formula::True => 1,
            Formula::Pred(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Eq(a, b) => 1 + a.size() + b.size(),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn instantiate_types(&self, map: &std::collections::BTreeMap<String, Type>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let bin = |a: &Formula, b: &Formula| {
            (
                Box::new(a.instantiate_types(map)),
                Box::new(b.instantiate_types(map)),
            )
        };
        match self {
            Formula::False | Formula::True => self.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(*p, args.iter().map(|a| a.instantiate_types(map)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.instantiate_types(map), b.instantiate_types(map)),
            Formula::Not(f) => Formula::Not(Box::new(f.instantiate_types(map))),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b);
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Iff(a, b)
            }
            Formula::Forall(v, f) => Formula::Forall(
                Var::new(v.name.clone(), v.ty.instantiate(map)),
                Box::new(f.instantiate_types(map)),
            ),
            Formula::Exists(v, f) => Formula::Exists(
                Var::new(v.name.clone(), v.ty.instantiate(map)),
                Box::new(f.instantiate_types(map)),
            ),
        }
    }
}

fn collect_term_free(t: &Term, bound: &[String], out: &mut IndexMap<String, Type>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(&v.name) {
                out.entry(v.name.clone()).or_insert_with(|| v.ty.clone());
            }
        }
        Term::Int(_) => {}
        Term::App { args, .. } => args.iter().for_each(|a| collect_term_free(a, bound, out)),
    }
}

/// Free variables of a list of formulas, first occurrence order.
pub fn free_var_decls_of<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> IndexMap<String, Type> {
    let mut out = IndexMap::new();
    for f in fs {
        for (n, t) in f.free_var_decls() {
            out.entry(n).or_insert(t);
        }
    }
    out
}

/// Borrowed view of a node addressed by a position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node<'a> {
    Formula(&'a Formula),
    Term(&'a Term),
}

/// Owned formula-or-term, used by `replace_at`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Formula(Formula),
    Term(Term),
}

impl From<Formula> for Expr {
    fn from(f: Formula) -> Self {
        Expr::Formula(f)
    }
}

impl From<Term> for Expr {
    fn from(t: Term) -> Self {
        Expr::Term(t)
    }
}

impl Node<'_> {
    pub fn to_owned(self) -> Expr {
        match self {
            Node::Formula(f) => Expr::Formula(f.clone()),
            Node::Term(t) => Expr::Term(t.clone()),
        }
    }
}

/// Names reserved by the concrete syntax.
pub const KEYWORDS: &[&str] = &[
    "not", "or", "ovl", "card", "dom", "ran", "finite", "functional", "true", "false", "btrue",
    "bfalse", "INT", "POW", "oftype",
];

/// Declarations a formula is typechecked against: given sets, user function
/// symbols and typed free variables. Names are pairwise disjoint.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub sets: Vec<String>,
    pub functions: IndexMap<String, Arc<FunctionSymbol>>,
    pub variables: IndexMap<String, Type>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &str) -> Result<(), String> {
        if !is_identifier(name) {
            return Err(format!("`{name}` is not a valid identifier"));
        }
        if KEYWORDS.contains(&name) {
            return Err(format!("`{name}` is a reserved word"));
        }
        if self.sets.iter().any(|s| s == name)
            || self.functions.contains_key(name)
            || self.variables.contains_key(name)
        {
            return Err(format!("`{name}` is already declared"));
        }
        Ok(())
    }

    pub fn check_type(&self, ty: &Type) -> Result<(), String> {
        let mut sets = Vec::new();
        ty.given_sets(&mut sets);
        match sets.into_iter().find(|s| !self.sets.contains(s)) {
            Some(s) => Err(format!("type {ty} mentions undeclared set {s}")),
            None => Ok(()),
        }
    }

    pub fn add_set(&mut self, name: impl Into<String>) -> Result<(), String> {
        let name = name.into();
        self.check_fresh(&name)?;
        self.sets.push(name);
        Ok(())
    }

    pub fn add_variable(&mut self, name: impl Into<String>, ty: Type) -> Result<(), String> {
        let name = name.into();
        self.check_fresh(&name)?;
        self.check_type(&ty)?;
        self.variables.insert(name, ty);
        Ok(())
    }

    /// Declares a variable, accepting a redeclaration with the same type.
    pub fn declare_variable(&mut self, name: impl Into<String>, ty: Type) -> Result<(), String> {
        let name = name.into();
        match self.variables.get(&name) {
            Some(t) if *t == ty => Ok(()),
            Some(t) => Err(format!("`{name}` is already declared with type {t}")),
            None => self.add_variable(name, ty),
        }
    }

    pub fn add_function(&mut self, f: FunctionSymbol) -> Result<(), String> {
        self.check_fresh(&f.name)?;
        for p in &f.params {
            self.check_type(&p.ty)?;
        }
        self.check_type(&f.result)?;
        self.functions.insert(f.name.clone(), Arc::new(f));
        Ok(())
    }

    /// Merges another signature's sets and functions (not its variables).
    pub fn import(&mut self, other: &Signature) -> Result<(), String> {
        for s in &other.sets {
            if !self.sets.contains(s) {
                self.add_set(s.clone())?;
            }
        }
        for (name, f) in &other.functions {
            match self.functions.get(name) {
                Some(existing) if existing == f => {}
                Some(_) => return Err(format!("conflicting declarations of function {name}")),
                None => {
                    self.check_fresh(name)?;
                    self.functions.insert(name.clone(), f.clone());
                }
            }
        }
        Ok(())
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}
