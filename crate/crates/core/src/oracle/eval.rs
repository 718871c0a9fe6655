use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Bounds, Domain, EvalError, TriBool, Value};
use crate::syntax::{Formula, Op, Pred, Term, Type};

/// Largest set the evaluator will build from a range.
const MAX_SET: u64 = 1 << 20;

/// Variable bindings, innermost last.
pub type Env = Vec<(String, Value)>;

/// Three-valued evaluator with a shared step budget and cached domains.
pub struct Evaluator<'b> {
    bounds: &'b Bounds,
    domains: RefCell<HashMap<Type, Rc<Domain>>>,
    steps: Cell<u64>,
}

impl<'b> Evaluator<'b> {
    pub fn new(bounds: &'b Bounds) -> Self {
        Evaluator {
            bounds,
            domains: RefCell::new(HashMap::new()),
            steps: Cell::new(0),
        }
    }

    pub fn bounds(&self) -> &Bounds {
        self.bounds
    }

    pub fn steps(&self) -> u64 {
        self.steps.get()
    }

    pub(crate) fn tick(&self) -> Result<(), EvalError> {
        let n = self.steps.get() + 1;
        self.steps.set(n);
        if n > self.bounds.budget {
            Err(EvalError::Budget(self.bounds.budget))
        } else {
            Ok(())
        }
    }

    pub fn domain(&self, ty: &Type) -> Result<Rc<Domain>, EvalError> {
        if let Some(d) = self.domains.borrow().get(ty) {
            return Ok(d.clone());
        }
        let d = Rc::new(Domain::of(ty, self.bounds)?);
        self.domains.borrow_mut().insert(ty.clone(), d.clone());
        Ok(d)
    }

    /// Value of `t`, or `None` when undefined.
    pub fn term(&self, t: &Term, env: &mut Env) -> Result<Option<Value>, EvalError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| *n == v.name)
                .map(|(_, val)| Some(val.clone()))
                .ok_or_else(|| EvalError::Unassigned(v.name.clone())),
            Term::Int(i) => Ok(Some(Value::Int(i.clone()))),
            Term::App { op, args, .. } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.term(a, env)? {
                        Some(v) => vals.push(v),
                        None => return Ok(None),
                    }
                }
                self.apply_op(op, vals)
            }
        }
    }

    fn apply_op(&self, op: &Op, vals: Vec<Value>) -> Result<Option<Value>, EvalError> {
        let int = |i: usize| vals[i].as_int().expect("typechecked INT");
        let set = |i: usize| vals[i].as_set().expect("typechecked set");
        Ok(Some(match op {
            Op::Add => Value::Int(int(0) + int(1)),
            Op::Sub => Value::Int(int(0) - int(1)),
            Op::Mul => Value::Int(int(0) * int(1)),
            Op::Div => {
                if int(1).is_zero() {
                    return Ok(None);
                }
                Value::Int(int(0) / int(1))
            }
            Op::Range => {
                let (lo, hi) = (int(0), int(1));
                if hi >= lo {
                    let n: BigInt = hi - lo + 1;
                    if n.to_u64().is_none_or(|n| n > MAX_SET) {
                        return Err(EvalError::Unboundable(format!("range {lo}..{hi} is too large")));
                    }
                }
                let mut out = BTreeSet::new();
                let mut i = lo.clone();
                while &i <= hi {
                    out.insert(Value::Int(i.clone()));
                    i += 1;
                }
                Value::Set(out)
            }
            Op::Card => Value::int(set(0).len()),
            Op::Empty => Value::Set(BTreeSet::new()),
            Op::Enum => Value::set(vals.iter().cloned()),
            Op::Union => Value::Set(set(0).union(set(1)).cloned().collect()),
            Op::Inter => Value::Set(set(0).intersection(set(1)).cloned().collect()),
            Op::Diff => Value::Set(set(0).difference(set(1)).cloned().collect()),
            Op::Maplet => Value::pair(vals[0].clone(), vals[1].clone()),
            Op::Dom => Value::set(set(0).iter().map(|p| p.as_pair().expect("pair").0.clone())),
            Op::Ran => Value::set(set(0).iter().map(|p| p.as_pair().expect("pair").1.clone())),
            Op::Ovl => {
                let g = set(1);
                let dom_g: BTreeSet<&Value> = g.iter().map(|p| p.as_pair().expect("pair").0).collect();
                let mut out = g.clone();
                for p in set(0) {
                    if !dom_g.contains(p.as_pair().expect("pair").0) {
                        out.insert(p.clone());
                    }
                }
                Value::Set(out)
            }
            Op::Apply => {
                let f = set(0);
                if !is_functional(f) {
                    return Ok(None);
                }
                match f.iter().find_map(|p| {
                    let (a, b) = p.as_pair().expect("pair");
                    (*a == vals[1]).then(|| b.clone())
                }) {
                    Some(v) => v,
                    None => return Ok(None),
                }
            }
            Op::User(f) => {
                let mut local: Env = f
                    .params
                    .iter()
                    .map(|p| p.name.clone())
                    .zip(vals)
                    .collect();
                if self.formula(&f.wd, &mut local)? != TriBool::T {
                    return Ok(None);
                }
                let body = f.body.as_ref().ok_or_else(|| EvalError::NoBody(f.name.clone()))?;
                return self.term(body, &mut local);
            }
        }))
    }

    pub fn formula(&self, f: &Formula, env: &mut Env) -> Result<TriBool, EvalError> {
        Ok(match f {
            Formula::False => TriBool::F,
            Formula::True => TriBool::T,
            Formula::Pred(p, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.term(a, env)? {
                        Some(v) => vals.push(v),
                        None => return Ok(TriBool::U),
                    }
                }
                TriBool::from_bool(eval_pred(*p, &vals))
            }
            Formula::Eq(a, b) => match (self.term(a, env)?, self.term(b, env)?) {
                (Some(x), Some(y)) => TriBool::from_bool(x == y),
                _ => TriBool::U,
            },
            Formula::Not(g) => self.formula(g, env)?.not(),
            Formula::And(a, b) => {
                let x = self.formula(a, env)?;
                if x == TriBool::F {
                    return Ok(TriBool::F);
                }
                x.and(self.formula(b, env)?)
            }
            Formula::Or(a, b) => {
                let x = self.formula(a, env)?;
                if x == TriBool::T {
                    return Ok(TriBool::T);
                }
                x.or(self.formula(b, env)?)
            }
            Formula::Implies(a, b) => {
                let x = self.formula(a, env)?.not();
                if x == TriBool::T {
                    return Ok(TriBool::T);
                }
                x.or(self.formula(b, env)?)
            }
            Formula::Iff(a, b) => match (self.formula(a, env)?, self.formula(b, env)?) {
                (TriBool::U, _) | (_, TriBool::U) => TriBool::U,
                (x, y) => TriBool::from_bool(x == y),
            },
            Formula::Forall(v, body) => self.quantify(v.name.clone(), &v.ty, body, env, TriBool::F)?,
            Formula::Exists(v, body) => self.quantify(v.name.clone(), &v.ty, body, env, TriBool::T)?,
        })
    }

    /// Kleene quantification: `dominant` (F for ∀, T for ∃) wins outright,
    /// otherwise any undefined instance makes the result undefined.
    fn quantify(
        &self,
        name: String,
        ty: &Type,
        body: &Formula,
        env: &mut Env,
        dominant: TriBool,
    ) -> Result<TriBool, EvalError> {
        let dom = self.domain(ty)?;
        let mut undefined = false;
        env.push((name, Value::Int(BigInt::zero())));
        let mut cur = dom.cursor();
        let result = loop {
            self.tick()?;
            env.last_mut().expect("pushed").1 = cur.value(&dom);
            match self.formula(body, env) {
                Err(e) => {
                    env.pop();
                    return Err(e);
                }
                Ok(r) if r == dominant => break dominant,
                Ok(TriBool::U) => undefined = true,
                Ok(_) => {}
            }
            if !cur.advance(&dom) {
                break if undefined { TriBool::U } else { dominant.not() };
            }
        };
        env.pop();
        Ok(result)
    }
}

fn is_functional(f: &BTreeSet<Value>) -> bool {
    // Pairs sort by first component, so clashes are adjacent.
    let mut prev: Option<&Value> = None;
    for p in f {
        let a = p.as_pair().expect("pair").0;
        if prev == Some(a) {
            return false;
        }
        prev = Some(a);
    }
    true
}

fn eval_pred(p: Pred, vals: &[Value]) -> bool {
    let int = |i: usize| vals[i].as_int().expect("typechecked INT");
    match p {
        Pred::Lt => int(0) < int(1),
        Pred::Le => int(0) <= int(1),
        Pred::Gt => int(0) > int(1),
        Pred::Ge => int(0) >= int(1),
        Pred::Mem => vals[1].as_set().expect("set").contains(&vals[0]),
        Pred::Subset => vals[0]
            .as_set()
            .expect("set")
            .is_subset(vals[1].as_set().expect("set")),
        Pred::Finite => true,
        Pred::Functional => is_functional(vals[0].as_set().expect("set")),
    }
}
