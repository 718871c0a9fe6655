//! Well-definedness conditions.
//!
//! `wd_term` and `wd_formula` compute the D operator. Results are normalised
//! only by the trivial absorber in [`absorb`]; nothing else is simplified.

use crate::syntax::{Formula, Op, Pred, Substitution, Term, Var};

/// Smart constructors that drop trivially true subformulas.
pub mod absorb {
    use crate::syntax::{Formula, Var};

    pub fn and(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, f) | (f, Formula::True) => f,
            (a, b) => Formula::and(a, b),
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (a, b) => Formula::or(a, b),
        }
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        match body {
            Formula::True => Formula::True,
            body => Formula::forall(v, body),
        }
    }

    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().fold(Formula::True, and)
    }
}

/// The domain condition `C^f` of an operator instantiated with `args`.
pub fn domain_condition(op: &Op, args: &[Term]) -> Formula {
    match op {
        Op::Div => Formula::neq(args[1].clone(), Term::int(0)),
        Op::Card => Formula::Pred(Pred::Finite, vec![args[0].clone()]),
        Op::Apply => {
            let dom = Term::mk(Op::Dom, vec![args[0].clone()]);
            Formula::and(
                Formula::Pred(Pred::Mem, vec![args[1].clone(), dom]),
                Formula::Pred(Pred::Functional, vec![args[0].clone()]),
            )
        }
        Op::User(f) => {
            let sigma = Substitution::from_pairs(f.params.iter().cloned().zip(args.iter().cloned()))
                .expect("arguments typechecked against parameters");
            sigma
                .apply_formula(&f.wd)
                .expect("domain conditions are quantifier-free")
        }
        _ => Formula::True,
    }
}

/// `D(t)`.
pub fn wd_term(t: &Term) -> Formula {
    match t {
        Term::Var(_) | Term::Int(_) => Formula::True,
        Term::App { op, args, .. } => {
            let parts = absorb::conj(args.iter().map(wd_term));
            absorb::and(parts, domain_condition(op, args))
        }
    }
}

fn wd_terms(ts: &[Term]) -> Formula {
    absorb::conj(ts.iter().map(wd_term))
}

/// `D(f)`.
pub fn wd_formula(f: &Formula) -> Formula {
    use absorb::{and, or};
    match f {
        Formula::False | Formula::True => Formula::True,
        Formula::Pred(_, args) => wd_terms(args),
        Formula::Eq(a, b) => and(wd_term(a), wd_term(b)),
        Formula::Not(g) => wd_formula(g),
        Formula::And(a, b) => {
            let (da, db) = (wd_formula(a), wd_formula(b));
            or(
                or(
                    and(da.clone(), db.clone()),
                    and(da, Formula::not((**a).clone())),
                ),
                and(db, Formula::not((**b).clone())),
            )
        }
        Formula::Or(a, b) => {
            let (da, db) = (wd_formula(a), wd_formula(b));
            or(
                or(and(da.clone(), db.clone()), and(da, (**a).clone())),
                and(db, (**b).clone()),
            )
        }
        Formula::Implies(a, b) => {
            let (da, db) = (wd_formula(a), wd_formula(b));
            or(
                or(
                    and(da.clone(), db.clone()),
                    and(da, Formula::not((**a).clone())),
                ),
                and(db, (**b).clone()),
            )
        }
        Formula::Iff(a, b) => and(wd_formula(a), wd_formula(b)),
        Formula::Forall(x, g) => {
            let dg = wd_formula(g);
            or(
                absorb::forall(x.clone(), dg.clone()),
                Formula::exists(x.clone(), and(dg, Formula::not((**g).clone()))),
            )
        }
        Formula::Exists(x, g) => {
            let dg = wd_formula(g);
            or(
                absorb::forall(x.clone(), dg.clone()),
                Formula::exists(x.clone(), and(dg, (**g).clone())),
            )
        }
    }
}

/// The closed formula `∀x⃗·(⋀H ⇒ G)` over the free variables of the sequent.
pub fn sequent_closure(hyps: &[Formula], goal: &Formula) -> Formula {
    let body = if hyps.is_empty() {
        goal.clone()
    } else {
        Formula::implies(Formula::conj(hyps.iter().cloned()), goal.clone())
    };
    let vars = crate::syntax::free_var_decls_of(hyps.iter().chain(std::iter::once(goal)));
    vars.into_iter()
        .rev()
        .fold(body, |acc, (name, ty)| Formula::forall(Var::new(name, ty), acc))
}

/// `D(H ⊢ G)`.
pub fn wd_sequent(hyps: &[Formula], goal: &Formula) -> Formula {
    wd_formula(&sequent_closure(hyps, goal))
}

/// True when every function symbol in `f` has a trivially true domain
/// condition, so `f` itself can never be undefined.
pub fn is_total(f: &Formula) -> bool {
    let mut ops = Vec::new();
    f.ops(&mut ops);
    ops.iter().all(is_total_op)
}

pub fn is_total_term(t: &Term) -> bool {
    let mut ops = Vec::new();
    t.ops(&mut ops);
    ops.iter().all(is_total_op)
}

fn is_total_op(op: &Op) -> bool {
    match op {
        Op::Div | Op::Card | Op::Apply => false,
        Op::User(f) => f.wd == Formula::True,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term, Signature, Type};

    fn sig() -> Signature {
        let mut s = Signature::new();
        for n in ["a", "b", "x", "i", "j"] {
            s.add_variable(n, Type::Int).unwrap();
        }
        s.add_variable("f", Type::relation(Type::Int, Type::Int)).unwrap();
        s.add_variable("s", Type::pow(Type::Int)).unwrap();
        s
    }

    fn p(t: &str) -> Formula {
        parse_formula(t, &sig()).unwrap()
    }

    #[test]
    fn variables_are_defined() {
        assert_eq!(wd_term(&parse_term("x", &sig()).unwrap()), Formula::True);
    }

    #[test]
    fn registry_conditions() {
        assert_eq!(wd_term(&parse_term("a / b", &sig()).unwrap()), p("b /= 0"));
        assert_eq!(wd_term(&parse_term("f(x)", &sig()).unwrap()), p("x : dom(f) & functional(f)"));
        assert_eq!(wd_term(&parse_term("card(s)", &sig()).unwrap()), p("finite(s)"));
        assert_eq!(wd_term(&parse_term("card(i..j) + 1", &sig()).unwrap()), p("finite(i..j)"));
    }

    #[test]
    fn nested_conditions_keep_argument_order() {
        let t = parse_term("(a / b) / x", &sig()).unwrap();
        assert_eq!(wd_term(&t), p("b /= 0 & x /= 0"));
    }

    #[test]
    fn formula_expansions() {
        assert_eq!(wd_formula(&Formula::False), Formula::True);
        assert_eq!(wd_formula(&p("a / b = 1")), p("b /= 0"));
        assert_eq!(wd_formula(&p("x = x & false")), Formula::True);
        assert_eq!(
            wd_formula(&p("a / b = 1 & x = 1")),
            p("b /= 0 or b /= 0 & not a / b = 1 or x /= 1")
        );
        assert_eq!(
            wd_formula(&p("!z:INT. a / z = 1")),
            p("(!z:INT. z /= 0) or (#z:INT. z /= 0 & not a / z = 1)")
        );
    }

    #[test]
    fn sequent_wd_of_total_sequent_is_true() {
        assert_eq!(wd_sequent(&[], &p("x = x")), Formula::True);
        assert_eq!(wd_sequent(&[Formula::False], &Formula::False), Formula::True);
        let closed = sequent_closure(&[p("i <= j")], &p("card(i..j) = j - i + 1"));
        let want = parse_formula(
            "!i:INT. !j:INT. i <= j => card(i..j) = j - i + 1",
            &Signature::new(),
        )
        .unwrap();
        assert_eq!(closed, want);
    }

    #[test]
    fn wd_output_is_total() {
        for src in ["a / b = 1", "f(x) = card(s)", "not f(a) : s"] {
            assert!(is_total(&wd_formula(&p(src))), "{src}");
        }
        assert!(!is_total(&p("a / b = 1")));
        // Conditions mention their (possibly partial) operands; they are
        // guarded by the conjuncts before them rather than total.
        assert!(!is_total(&wd_formula(&p("a / b = 1 & x = 1"))));
        assert!(!is_total(&wd_term(&parse_term("f(a / b)", &sig()).unwrap())));
    }
}
