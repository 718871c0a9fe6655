//! Seeded generators for terms, formulas and rule instances over two free
//! integer variables. Bound variables are named `q0`, `q1`, ... by depth so
//! they never shadow each other or the free variables.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wdrewrite::oracle::{Bounds, Domain, Interpretation};
use wdrewrite::syntax::{Formula, Op, Pred, Signature, Term, Type, Var};

pub const FREE: [&str; 2] = ["x", "y"];

pub fn signature() -> Signature {
    let mut sig = Signature::new();
    for v in FREE {
        sig.declare_variable(v, Type::Int).unwrap();
    }
    sig
}

/// Every assignment of the free integer variables under `bounds`.
pub fn models(bounds: &Bounds) -> Vec<Interpretation> {
    let dom = Domain::of(&Type::Int, bounds).unwrap();
    let mut out = Vec::new();
    for a in dom.values() {
        for b in dom.values() {
            out.push(
                Interpretation::new(bounds.clone())
                    .with(FREE[0], a.clone())
                    .with(FREE[1], b),
            );
        }
    }
    out
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    free: Vec<Var>,
    bound: Vec<Var>,
    /// Largest quantifier nesting a formula may have.
    pub max_binders: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen::with_vars(seed, FREE.iter().map(|n| Var::new(*n, Type::Int)).collect())
    }

    pub fn with_vars(seed: u64, free: Vec<Var>) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            free,
            bound: Vec::new(),
            max_binders: 2,
        }
    }

    fn literal(&mut self) -> Term {
        Term::int(self.rng.gen_range(-3i64..=3))
    }

    fn leaf(&mut self) -> Term {
        let vars: Vec<&Var> = self.free.iter().chain(&self.bound).collect();
        if vars.is_empty() || self.rng.gen_bool(0.35) {
            self.literal()
        } else {
            Term::Var((*vars.choose(&mut self.rng).unwrap()).clone())
        }
    }

    pub fn int_term(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..7) {
            0 => Term::mk(Op::Add, vec![self.int_term(d), self.int_term(d)]),
            1 => Term::mk(Op::Sub, vec![self.int_term(d), self.int_term(d)]),
            2 => Term::mk(Op::Mul, vec![self.leaf(), self.leaf()]),
            3 => Term::mk(Op::Div, vec![self.int_term(d), self.int_term(d)]),
            4 | 5 => Term::mk(Op::Card, vec![self.set_term(d)]),
            _ => Term::mk(Op::Apply, vec![self.rel_term(d), self.int_term(d)]),
        }
    }

    pub fn set_term(&mut self, depth: usize) -> Term {
        let d = depth.saturating_sub(1);
        let choice = if depth == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..8) };
        match choice {
            0 => Term::mk(Op::Range, vec![self.leaf(), self.leaf()]),
            1 => {
                let n = self.rng.gen_range(1..=3);
                Term::mk(Op::Enum, (0..n).map(|_| self.leaf()).collect())
            }
            2 => Term::empty(Type::Int),
            3 => Term::mk(Op::Range, vec![self.int_term(d), self.int_term(d)]),
            4 => Term::mk(Op::Union, vec![self.set_term(d), self.set_term(d)]),
            5 => Term::mk(Op::Inter, vec![self.set_term(d), self.set_term(d)]),
            6 => Term::mk(Op::Diff, vec![self.set_term(d), self.set_term(d)]),
            _ => {
                let op = if self.rng.gen_bool(0.5) { Op::Dom } else { Op::Ran };
                Term::mk(op, vec![self.rel_term(d)])
            }
        }
    }

    pub fn rel_term(&mut self, depth: usize) -> Term {
        if depth > 0 && self.rng.gen_bool(0.3) {
            let d = depth - 1;
            return Term::mk(Op::Ovl, vec![self.rel_term(d), self.rel_term(d)]);
        }
        let n = self.rng.gen_range(1..=3);
        let pairs = (0..n)
            .map(|_| Term::mk(Op::Maplet, vec![self.leaf(), self.leaf()]))
            .collect();
        Term::mk(Op::Enum, pairs)
    }

    fn atom(&mut self, depth: usize) -> Formula {
        let d = depth.saturating_sub(1);
        match self.rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2 | 3 => Formula::eq(self.int_term(d), self.int_term(d)),
            4 => {
                let p = *[Pred::Lt, Pred::Le, Pred::Gt, Pred::Ge].choose(&mut self.rng).unwrap();
                Formula::pred(p, vec![self.int_term(d), self.int_term(d)])
            }
            5 | 6 => Formula::pred(Pred::Mem, vec![self.int_term(d), self.set_term(d)]),
            7 => Formula::pred(Pred::Subset, vec![self.set_term(d), self.set_term(d)]),
            8 => Formula::pred(Pred::Functional, vec![self.rel_term(d)]),
            _ => Formula::eq(self.set_term(d), self.set_term(d)),
        }
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.atom(depth);
        }
        let d = depth - 1;
        let k = if self.bound.len() < self.max_binders { 8 } else { 6 };
        match self.rng.gen_range(0..k) {
            0 => Formula::not(self.formula(d)),
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::or(self.formula(d), self.formula(d)),
            3 => Formula::implies(self.formula(d), self.formula(d)),
            4 => Formula::iff(self.formula(d), self.formula(d)),
            5 => self.atom(depth),
            q => {
                let v = Var::new(format!("q{}", self.bound.len()), Type::Int);
                self.bound.push(v.clone());
                let body = self.formula(d);
                self.bound.pop();
                if q == 6 {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }
}

pub mod theorems;
pub mod trees;

pub const CARD: &str = include_str!("../../../../theories/card.theory");

/// The card group as written, flags not yet established.
pub fn card_group() -> wdrewrite::rewrite::GroupedRule {
    wdrewrite::theory::parse_theory(CARD).unwrap().groups().unwrap().remove(0)
}

/// A theory over metavariables `i` and `j` with a partial function `half`
/// and between one and four generated rules.
pub fn theory(seed: u64) -> wdrewrite::theory::Theory {
    use std::sync::Arc;
    use wdrewrite::syntax::FunctionSymbol;
    use wdrewrite::theory::{RuleDecl, Theory};

    let meta = vec![Var::new("i", Type::Int), Var::new("j", Type::Int)];
    let m = Term::var("m", Type::Int);
    let half = Arc::new(FunctionSymbol {
        name: "half".into(),
        params: vec![Var::new("m", Type::Int)],
        result: Type::Int,
        wd: Formula::pred(Pred::Ge, vec![m.clone(), Term::int(0)]),
        body: Some(Term::mk(Op::Div, vec![m, Term::int(2)])),
    });
    let mut g = Gen::with_vars(seed, meta.clone());
    let auto = g.rng.gen_bool(0.5);
    let n = g.rng.gen_range(1..=4);
    let mut rules = Vec::new();
    for k in 0..n {
        let lhs = loop {
            let t = g.int_term(3);
            let t = if g.rng.gen_bool(0.2) { Term::mk(Op::User(half.clone()), vec![t]) } else { t };
            if !t.is_var() {
                break t;
            }
        };
        let vars: Vec<Var> = meta.iter().filter(|v| lhs.free_vars().contains(&v.name)).cloned().collect();
        let mut h = Gen::with_vars(g.rng.gen(), vars);
        h.max_binders = 1;
        let cases = (0..g.rng.gen_range(1..=3)).map(|_| (h.formula(2), h.int_term(2))).collect();
        rules.push(RuleDecl {
            name: format!("r{k}"),
            lhs,
            auto,
            cases,
        });
    }
    Theory {
        name: format!("t{}", seed % 1000),
        sets: vec![],
        metavariables: meta,
        functions: vec![(*half).clone()],
        rules,
    }
}
