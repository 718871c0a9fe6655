use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{Substitution, Term, Type, Var};

/// One-way matching with type parameters: finds `σ` and a type binding
/// such that `σ(pattern)`, with `params` instantiated, equals `subject`.
pub fn match_typed(
    pattern: &Term,
    subject: &Term,
    metavars: &BTreeSet<String>,
    params: &[String],
) -> Option<(Substitution, BTreeMap<String, Type>)> {
    let mut types = BTreeMap::new();
    let mut binds: BTreeMap<String, (Type, Term)> = BTreeMap::new();
    if !go(pattern, subject, metavars, params, &mut types, &mut binds) {
        return None;
    }
    let sigma = Substitution::from_pairs(
        binds
            .into_iter()
            .map(|(n, (ty, t))| (Var::new(n, ty.instantiate(&types)), t)),
    )
    .ok()?;
    Some((sigma, types))
}

/// Plain one-way matching without type parameters.
pub fn match_term(pattern: &Term, subject: &Term, metavars: &BTreeSet<String>) -> Option<Substitution> {
    match_typed(pattern, subject, metavars, &[]).map(|(s, _)| s)
}

fn go(
    p: &Term,
    s: &Term,
    metavars: &BTreeSet<String>,
    params: &[String],
    types: &mut BTreeMap<String, Type>,
    binds: &mut BTreeMap<String, (Type, Term)>,
) -> bool {
    match p {
        Term::Var(v) if metavars.contains(&v.name) => {
            if !v.ty.match_with(s.ty(), params, types) {
                return false;
            }
            match binds.get(&v.name) {
                Some((_, t)) => t == s,
                None => {
                    binds.insert(v.name.clone(), (v.ty.clone(), s.clone()));
                    true
                }
            }
        }
        Term::Var(v) => match s {
            Term::Var(w) => v.name == w.name && v.ty.match_with(&w.ty, params, types),
            _ => false,
        },
        Term::Int(i) => matches!(s, Term::Int(j) if i == j),
        Term::App { op, args, ty } => match s {
            Term::App {
                op: sop,
                args: sargs,
                ty: sty,
            } => {
                op == sop
                    && args.len() == sargs.len()
                    && ty.match_with(sty, params, types)
                    && args
                        .iter()
                        .zip(sargs)
                        .all(|(a, b)| go(a, b, metavars, params, types, binds))
            }
            _ => false,
        },
    }
}
