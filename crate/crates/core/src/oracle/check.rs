use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Bounds, Cursor, Domain, Env, EvalError, Evaluator, Interpretation, TriBool, Value};
use crate::syntax::{free_var_decls_of, Formula, Type};
use crate::wd::wd_formula;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckResult {
    /// No counterexample among `models` interpretations.
    BoundedValid { models: u128 },
    Counterexample(Interpretation),
    /// The search could not be completed.
    Unknown(String),
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckResult::BoundedValid { .. })
    }

    pub fn counterexample(&self) -> Option<&Interpretation> {
        match self {
            CheckResult::Counterexample(m) => Some(m),
            _ => None,
        }
    }
}

/// Counterexample search for `H ⊢_D G`.
///
/// Free variables are enumerated in `order` first and then in order of first
/// occurrence; pinned variables are fixed. A subtree is abandoned as soon as
/// a fully assigned hypothesis (or its well-definedness) is not true, or the
/// goal is already true.
#[derive(Clone, Debug)]
pub struct Checker {
    bounds: Bounds,
    order: Vec<String>,
    pins: IndexMap<String, Value>,
}

enum Check {
    /// Must evaluate to T.
    Holds(Formula),
    /// Must not evaluate to T.
    Fails(Formula),
}

struct Search<'e> {
    eval: &'e Evaluator<'e>,
    vars: Vec<(String, std::rc::Rc<Domain>)>,
    /// Checks that become decidable once the first `k` variables are set.
    by_level: Vec<Vec<Check>>,
    models: u128,
}

impl Checker {
    pub fn new(bounds: &Bounds) -> Self {
        Checker {
            bounds: bounds.clone(),
            order: Vec::new(),
            pins: IndexMap::new(),
        }
    }

    pub fn order<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.order = names.into_iter().map(Into::into).collect();
        self
    }

    pub fn pin(mut self, name: impl Into<String>, v: Value) -> Self {
        self.pins.insert(name.into(), v);
        self
    }

    pub fn check(&self, hyps: &[Formula], goal: &Formula) -> CheckResult {
        match self.run(hyps, goal) {
            Ok(r) => r,
            Err(e) => CheckResult::Unknown(e.to_string()),
        }
    }

    fn ordered_vars(&self, hyps: &[Formula], goal: &Formula) -> IndexMap<String, Type> {
        let decls = free_var_decls_of(hyps.iter().chain(std::iter::once(goal)));
        let mut out = IndexMap::new();
        for n in &self.order {
            if let Some(t) = decls.get(n) {
                out.insert(n.clone(), t.clone());
            }
        }
        for (n, t) in decls {
            out.entry(n).or_insert(t);
        }
        out
    }

    fn run(&self, hyps: &[Formula], goal: &Formula) -> Result<CheckResult, EvalError> {
        self.bounds.validate().map_err(EvalError::Unboundable)?;
        let eval = Evaluator::new(&self.bounds);
        let all = self.ordered_vars(hyps, goal);
        let mut vars = Vec::new();
        for (n, t) in &all {
            if !self.pins.contains_key(n) {
                vars.push((n.clone(), eval.domain(t)?));
            }
        }
        let level = |f: &Formula| {
            f.free_vars()
                .iter()
                .filter_map(|n| vars.iter().position(|(v, _)| v == n))
                .map(|i| i + 1)
                .max()
                .unwrap_or(0)
        };
        let mut by_level: Vec<Vec<Check>> = (0..=vars.len()).map(|_| Vec::new()).collect();
        for h in hyps {
            let d = wd_formula(h);
            by_level[level(&d)].push(Check::Holds(d));
            by_level[level(h)].push(Check::Holds(h.clone()));
        }
        let dg = wd_formula(goal);
        by_level[level(&dg)].push(Check::Holds(dg));
        by_level[level(goal)].push(Check::Fails(goal.clone()));

        let mut env: Env = self.pins.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let base = env.len();
        let mut search = Search {
            eval: &eval,
            vars,
            by_level,
            models: 0,
        };
        if search.dfs(0, &mut env)? {
            let mut m = Interpretation::new(self.bounds.clone());
            for n in all.keys() {
                let v = match self.pins.get(n) {
                    Some(v) => v.clone(),
                    None => {
                        let i = search.vars.iter().position(|(v, _)| v == n).expect("enumerated");
                        env[base + i].1.clone()
                    }
                };
                m.assignment.insert(n.clone(), v);
            }
            return Ok(CheckResult::Counterexample(m));
        }
        Ok(CheckResult::BoundedValid {
            models: search.models,
        })
    }
}

impl Search<'_> {
    fn subtree_size(&self, from: usize) -> u128 {
        self.vars[from..]
            .iter()
            .fold(1u128, |acc, (_, d)| acc.saturating_mul(d.size() as u128))
    }

    /// Returns true when a counterexample extends the current assignment;
    /// `env` then holds it.
    fn dfs(&mut self, k: usize, env: &mut Env) -> Result<bool, EvalError> {
        for c in &self.by_level[k] {
            let ok = match c {
                Check::Holds(f) => self.eval.formula(f, env)? == TriBool::T,
                Check::Fails(f) => self.eval.formula(f, env)? != TriBool::T,
            };
            if !ok {
                self.models = self.models.saturating_add(self.subtree_size(k));
                return Ok(false);
            }
        }
        if k == self.vars.len() {
            return Ok(true);
        }
        let dom = self.vars[k].1.clone();
        let mut cur: Cursor = dom.cursor();
        env.push((self.vars[k].0.clone(), cur.value(&dom)));
        loop {
            self.eval.tick()?;
            if self.dfs(k + 1, env)? {
                return Ok(true);
            }
            if !cur.advance(&dom) {
                break;
            }
            env.last_mut().expect("pushed").1 = cur.value(&dom);
        }
        env.pop();
        Ok(false)
    }
}

pub fn check_sequent(hyps: &[Formula], goal: &Formula, bounds: &Bounds) -> CheckResult {
    Checker::new(bounds).check(hyps, goal)
}

/// Re-evaluates a claimed counterexample: true iff `m` makes every
/// hypothesis and both well-definedness conditions true while the goal is
/// not true.
pub fn replay(hyps: &[Formula], goal: &Formula, m: &Interpretation) -> Result<bool, EvalError> {
    let eval = Evaluator::new(&m.bounds);
    let mut env = m.env();
    for h in hyps {
        if eval.formula(&wd_formula(h), &mut env)? != TriBool::T
            || eval.formula(h, &mut env)? != TriBool::T
        {
            return Ok(false);
        }
    }
    Ok(eval.formula(&wd_formula(goal), &mut env)? == TriBool::T
        && eval.formula(goal, &mut env)? != TriBool::T)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn sig() -> Signature {
        let mut s = Signature::new();
        for n in ["a", "i", "j", "x", "y", "z"] {
            s.add_variable(n, Type::Int).unwrap();
        }
        s.add_variable("f", Type::relation(Type::Int, Type::Int)).unwrap();
        s
    }

    fn p(t: &str) -> Formula {
        parse_formula(t, &sig()).unwrap()
    }

    #[test]
    fn card_identity_is_bounded_valid() {
        let r = check_sequent(&[p("i <= j")], &p("card(i..j) = j - i + 1"), &Bounds::default());
        assert_eq!(r, CheckResult::BoundedValid { models: 49 });
        let r = check_sequent(&[p("i > j")], &p("card(i..j) = 0"), &Bounds::ints(-4, 4));
        assert!(r.is_valid());
    }

    #[test]
    fn nonzero_is_refuted_at_zero() {
        let r = check_sequent(&[], &p("a /= 0"), &Bounds::default());
        let m = r.counterexample().expect("counterexample");
        assert_eq!(m.to_string(), "a = 0");
        assert!(replay(&[], &p("a /= 0"), m).unwrap());
    }

    #[test]
    fn false_hypothesis_validates_anything() {
        let r = check_sequent(&[Formula::False], &p("a = 1"), &Bounds::default());
        assert!(r.is_valid());
    }

    #[test]
    fn ill_defined_goal_is_not_a_counterexample() {
        let r = check_sequent(&[], &p("1 / a = 2 or a = 0 or a = 1 or a = -1 or a = 2 or a = -2 or a = 3 or a = -3"), &Bounds::default());
        assert!(r.is_valid(), "{r:?}");
    }

    #[test]
    fn first_counterexample_respects_order_and_pins() {
        let g = p("x = y");
        let r = Checker::new(&Bounds::default()).order(["y", "x"]).check(&[], &g);
        assert_eq!(r.counterexample().unwrap().to_string(), "y = -3, x = -2");
        let r = Checker::new(&Bounds::default()).pin("x", Value::int(2)).check(&[], &g);
        assert_eq!(r.counterexample().unwrap().to_string(), "x = 2, y = -3");
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let b = Bounds {
            budget: 10,
            ..Bounds::default()
        };
        let r = check_sequent(&[], &p("x + y + z = x + y + z"), &b);
        assert!(matches!(r, CheckResult::Unknown(_)));
    }

    #[test]
    fn override_application_counterexample_unpinned() {
        let hyps = [
            p("x : dom(f ovl {z |-> y}) & functional(f ovl {z |-> y})"),
            p("x /= z"),
        ];
        let goal = p("x : dom(f) & functional(f)");
        let r = Checker::new(&Bounds::default()).order(["f", "x", "y", "z"]).check(&hyps, &goal);
        let m = r.counterexample().expect("counterexample");
        assert!(replay(&hyps, &goal, m).unwrap());
    }
}
