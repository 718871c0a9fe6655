//! Random instances of rewriting inside a context: a substitution instance
//! of a rule's left-hand side placed at an integer position of a generated
//! term or formula.

use rand::seq::SliceRandom;

use wdrewrite::oracle::{check_sequent, Bounds, CheckResult};
use wdrewrite::rewrite::GroupedRule;
use wdrewrite::syntax::{Expr, Formula, Position, Substitution, Term, Type};
use wdrewrite::wd::wd_formula;

use super::Gen;

#[derive(Clone, Copy)]
pub enum Context {
    Term,
    Formula,
}

/// One checked sequent of an instance and its verdict.
pub struct Outcome {
    pub sequent: String,
    pub result: CheckResult,
}

fn position(steps: &[usize]) -> Position {
    steps.iter().fold(Position::root(), |p, &i| p.child(i))
}

fn int_positions(f: &Formula) -> Vec<Position> {
    f.term_positions()
        .into_iter()
        .filter(|(_, t)| *t.ty() == Type::Int)
        .map(|(p, _)| p)
        .collect()
}

/// Builds the instance for `seed` and checks, for every case `c : r`,
/// equality (terms) or equivalence (formulas) of the two sides under
/// `sigma(c)`, and preservation of well-definedness.
pub fn check_instance(rule: &GroupedRule, ctx: Context, seed: u64, bounds: &Bounds) -> Vec<Outcome> {
    let mut g = Gen::new(seed);
    let sigma = Substitution::from_pairs(rule.metavars.iter().map(|v| (v.clone(), g.int_term(2)))).unwrap();
    assert!(sigma.is_non_conflicting());
    let l = sigma.apply_term(&rule.lhs);
    let (before, plug): (Formula, Box<dyn Fn(&Term) -> Formula>) = loop {
        match ctx {
            Context::Term => {
                let t = g.int_term(3);
                let holder = Formula::eq(t.clone(), Term::int(0));
                let spots: Vec<Position> =
                    int_positions(&holder).into_iter().filter(|p| p.steps()[0] == 1).collect();
                let p = spots.choose(&mut g.rng).unwrap();
                let inner = position(&p.steps()[1..]);
                let at = move |s: &Term| Formula::eq(t.replace_at(&inner, s.clone()).unwrap(), Term::int(0));
                break (at(&l), Box::new(at));
            }
            Context::Formula => {
                let f = g.formula(3);
                let Some(p) = int_positions(&f).choose(&mut g.rng).cloned() else {
                    continue;
                };
                let at = move |s: &Term| f.replace_at(&p, Expr::Term(s.clone())).unwrap();
                break (at(&l), Box::new(at));
            }
        }
    };
    let mut out = Vec::new();
    for case in &rule.cases {
        let c = sigma.apply_formula(&case.cond).unwrap();
        let after = plug(&sigma.apply_term(&case.rhs));
        let same = match (&ctx, &before, &after) {
            (Context::Term, Formula::Eq(a, _), Formula::Eq(b, _)) => Formula::eq(a.clone(), b.clone()),
            _ => Formula::iff(before.clone(), after.clone()),
        };
        let preserve = (vec![wd_formula(&before), c.clone()], wd_formula(&after));
        for (hyps, goal) in [(vec![c.clone()], same), preserve] {
            let text = format!(
                "{} |- {}",
                hyps.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                goal
            );
            out.push(Outcome {
                sequent: text,
                result: check_sequent(&hyps, &goal, bounds),
            });
        }
    }
    out
}
