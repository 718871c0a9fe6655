use std::fmt;

use super::{ProofTree, Rule, Sequent, Step};
use crate::oracle::{replay, Bounds, CheckResult, Checker, Interpretation};
use crate::syntax::Formula;

/// Why [`auto_discharge`] gave up.
#[derive(Clone, Debug)]
pub struct AutoFailure {
    /// The decomposition, with the leaves that could not be closed left open.
    pub tree: ProofTree,
    /// A model refuting the input sequent, when one was found.
    pub counterexample: Option<Interpretation>,
    /// No counterexample was found and some leaf could not be decided.
    pub inconclusive: bool,
    pub reason: String,
}

impl fmt::Display for AutoFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            Some(m) => write!(f, "{} (counterexample: {m})", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

/// Invertible decomposition; `None` leaves the node for the oracle.
fn pick(s: &Sequent) -> Option<Rule> {
    if s.has_hyp(&s.goal) {
        return Some(Rule::Hyp);
    }
    if s.has_hyp(&Formula::False) {
        return Some(Rule::BotHyp);
    }
    if let Some(h) = s.hyps.iter().find(|h| matches!(h, Formula::And(..))) {
        return Some(Rule::AndHyp { hyp: h.clone() });
    }
    if s.goal == Formula::False {
        if let Some(h) = s.hyps.iter().find(|h| matches!(h, Formula::Not(_))) {
            return Some(Rule::NegHyp { hyp: h.clone() });
        }
    }
    match &s.goal {
        Formula::Eq(a, b) if a == b => Some(Rule::EqGoal),
        Formula::True | Formula::Implies(..) | Formula::Or(..) | Formula::Iff(..) => Some(Rule::UnfoldGoal),
        Formula::And(..) => Some(Rule::AndGoal),
        Formula::Not(_) => Some(Rule::NegGoal),
        Formula::Forall(x, _) if !s.hyps.iter().any(|h| h.free_vars().contains(&x.name)) => {
            Some(Rule::AllGoal)
        }
        _ => None,
    }
}

fn decompose(s: Sequent) -> ProofTree {
    match pick(&s) {
        Some(rule) => {
            let mut t = ProofTree::by(s, rule).expect("picked rules apply");
            t.children = std::mem::take(&mut t.children)
                .into_iter()
                .map(|c| decompose(c.conclusion))
                .collect();
            t
        }
        None => ProofTree::open(s),
    }
}

/// Share of the budget each leaf gets on the first pass, which looks for
/// cheap counterexamples before any leaf is searched in full.
const PROBE_SHARE: u64 = 100;

/// Longest leaf text quoted in a failure reason.
const QUOTE_LIMIT: usize = 120;

/// Decomposes `s` with invertible rules, then closes each remaining leaf
/// with the bounded oracle. The resulting tree passes
/// [`check_tree`](super::check_tree). On failure the first counterexample
/// found is reported; leaves are first probed with a small budget so that
/// an expensive valid leaf does not hide a refutable one.
pub fn auto_discharge(s: &Sequent, bounds: &Bounds) -> Result<ProofTree, AutoFailure> {
    let mut tree = decompose(s.clone());
    let order: Vec<String> = s
        .formulas()
        .flat_map(|f| f.free_var_decls().into_keys())
        .collect();
    let probe = Bounds {
        budget: (bounds.budget / PROBE_SHARE).max(1),
        ..bounds.clone()
    };
    let mut open = tree.open_leaves();
    let mut unknown: Option<String> = None;
    for (pass, b) in [&probe, bounds].into_iter().enumerate() {
        let mut still = Vec::new();
        for path in open {
            let leaf = tree.at_mut(&path).expect("leaf path");
            let r = Checker::new(b)
                .order(order.iter().cloned())
                .check(&leaf.conclusion.hyps, &leaf.conclusion.goal);
            match r {
                CheckResult::BoundedValid { .. } => leaf.step = Step::Oracle(bounds.clone()),
                CheckResult::Counterexample(mut m) => {
                    m.bounds = bounds.clone();
                    let reason = format!("counterexample to `{}`", quote(&leaf.conclusion));
                    let counterexample = lift(s, &m);
                    return Err(AutoFailure {
                        tree,
                        counterexample,
                        inconclusive: false,
                        reason,
                    });
                }
                CheckResult::Unknown(r) => {
                    if pass == 1 {
                        unknown.get_or_insert(format!("inconclusive at `{}`: {r}", quote(&leaf.conclusion)));
                    }
                    still.push(path);
                }
            }
        }
        open = still;
    }
    match unknown {
        None => Ok(tree),
        Some(reason) => Err(AutoFailure {
            tree,
            counterexample: None,
            inconclusive: true,
            reason,
        }),
    }
}

fn quote(s: &Sequent) -> String {
    let text = s.to_string();
    match text.char_indices().nth(QUOTE_LIMIT) {
        Some((i, _)) => format!("{}...", &text[..i]),
        None => text,
    }
}

/// Restricts a leaf model to the root's free variables, keeping it only if
/// it still refutes the root.
fn lift(root: &Sequent, m: &Interpretation) -> Option<Interpretation> {
    let mut out = Interpretation::new(m.bounds.clone());
    for f in root.formulas() {
        for n in f.free_var_decls().into_keys() {
            if let Some(v) = m.get(&n) {
                out.assignment.entry(n).or_insert_with(|| v.clone());
            }
        }
    }
    match replay(&root.hyps, &root.goal, &out) {
        Ok(true) => Some(out),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_tree, Confidence, Verdict};
    use crate::syntax::{parse_formula, Signature, Type};
    use crate::wd::wd_formula;

    fn p(t: &str) -> Formula {
        let mut s = Signature::new();
        for n in ["a", "b", "i", "j"] {
            s.add_variable(n, Type::Int).unwrap();
        }
        parse_formula(t, &s).unwrap()
    }

    #[test]
    fn total_disjunction_wd_closes_fully() {
        let s = Sequent::goal(wd_formula(&p("1 <= 3 or 1 > 3")));
        let t = auto_discharge(&s, &Bounds::default()).unwrap();
        assert_eq!(check_tree(&t), Verdict::Accepted(Confidence::Full));
    }

    #[test]
    fn nonzero_goal_fails_with_witness() {
        let e = auto_discharge(&Sequent::goal(p("a /= 0")), &Bounds::default()).unwrap_err();
        assert_eq!(e.counterexample.unwrap().to_string(), "a = 0");
    }

    #[test]
    fn false_hypothesis_closes_fully() {
        let s = Sequent::new([Formula::False], p("a = 7"));
        let t = auto_discharge(&s, &Bounds::default()).unwrap();
        assert_eq!(t.step, Step::Rule(Rule::BotHyp));
        assert_eq!(check_tree(&t), Verdict::Accepted(Confidence::Full));
    }

    #[test]
    fn oracle_leaves_make_confidence_bounded() {
        let s = Sequent::new([p("i <= j & a = 1")], p("card(i..j) = j - i + 1 & a = 1"));
        let t = auto_discharge(&s, &Bounds::default()).unwrap();
        assert_eq!(check_tree(&t), Verdict::Accepted(Confidence::Bounded));
        assert!(t.size() > 2);
    }

    #[test]
    fn universal_goals_are_opened() {
        let s = Sequent::goal(p("!x:INT. x * 0 = 0"));
        let t = auto_discharge(&s, &Bounds::default()).unwrap();
        assert_eq!(t.step, Step::Rule(Rule::AllGoal));
    }

    #[test]
    fn a_cheap_refutation_is_found_behind_an_expensive_leaf() {
        let s = Sequent::goal(p("(!x:INT. !y:INT. !z:INT. x + y + z = z + y + x) & a /= 0"));
        let tight = Bounds {
            budget: 2_000,
            ..Bounds::default()
        };
        let e = auto_discharge(&s, &tight).unwrap_err();
        assert!(!e.inconclusive);
        assert_eq!(e.counterexample.unwrap().to_string(), "a = 0");
    }

    #[test]
    fn implications_are_decomposed() {
        let s = Sequent::goal(p("a = 1 => true"));
        let t = auto_discharge(&s, &Bounds::default()).unwrap();
        assert_eq!(check_tree(&t), Verdict::Accepted(Confidence::Full));
    }
}
