use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Sequent;
use crate::rewrite::{rewrite_step, Application, RewriteError};
use crate::syntax::{Formula, SubstError, Substitution, Term, Var};
use crate::wd::wd_formula;

/// Inference rules with their parameters. Hypothesis parameters name the
/// hypothesis the rule works on; it must be present in the conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "camelCase")]
pub enum Rule {
    Hyp,
    Mon { hyp: Formula },
    Contr,
    BotHyp,
    NegGoal,
    NegHyp { hyp: Formula },
    AndGoal,
    AndHyp { hyp: Formula },
    AllGoal,
    EqGoal,
    /// `H, E=F ⊢ [x:=F]P` from `H ⊢ [x:=E]P`.
    EqHyp { eq: Formula, var: Var, pattern: Formula },
    Cut { formula: Formula },
    AllHyp { hyp: Formula, witness: Term },
    GoalWd,
    HypWd { hyp: Formula },
    /// Replaces a derived connective at the root of the goal by its
    /// definition in terms of `¬`, `∧`, `∀` and `⊥`.
    UnfoldGoal,
    UnfoldHyp { hyp: Formula },
    Rewrite(Box<Application>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{rule}: {reason}")]
    Mismatch { rule: &'static str, reason: String },
    #[error("{rule}: `{var}` occurs free in the hypotheses")]
    SideCondition { rule: &'static str, var: String },
    #[error("{rule}: {source}")]
    Subst {
        rule: &'static str,
        #[source]
        source: SubstError,
    },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Hyp => "hyp",
            Rule::Mon { .. } => "mon",
            Rule::Contr => "contr",
            Rule::BotHyp => "botHyp",
            Rule::NegGoal => "negGoal",
            Rule::NegHyp { .. } => "negHyp",
            Rule::AndGoal => "andGoal",
            Rule::AndHyp { .. } => "andHyp",
            Rule::AllGoal => "allGoal",
            Rule::EqGoal => "eqGoal",
            Rule::EqHyp { .. } => "eqHyp",
            Rule::Cut { .. } => "cut",
            Rule::AllHyp { .. } => "allHyp",
            Rule::GoalWd => "goalWD",
            Rule::HypWd { .. } => "hypWD",
            Rule::UnfoldGoal => "unfoldGoal",
            Rule::UnfoldHyp { .. } => "unfoldHyp",
            Rule::Rewrite(_) => "rewrite",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match self {
            Rule::Mon { hyp }
            | Rule::NegHyp { hyp }
            | Rule::AndHyp { hyp }
            | Rule::HypWd { hyp }
            | Rule::UnfoldHyp { hyp } => write!(f, " [{hyp}]"),
            Rule::Cut { formula } => write!(f, " [{formula}]"),
            Rule::EqHyp { eq, var, pattern } => write!(f, " [{eq}] [{}] [{pattern}]", var.name),
            Rule::AllHyp { hyp, witness } => write!(f, " [{hyp}] [{witness}]"),
            Rule::Rewrite(app) => write!(f, " [{app}]"),
            _ => Ok(()),
        }
    }
}

/// Definition of a derived connective; `None` for primitive ones.
pub fn unfold(f: &Formula) -> Option<Formula> {
    Some(match f {
        Formula::True => Formula::not(Formula::False),
        Formula::Or(a, b) => Formula::not(Formula::and(
            Formula::not((**a).clone()),
            Formula::not((**b).clone()),
        )),
        Formula::Implies(a, b) => {
            Formula::not(Formula::and((**a).clone(), Formula::not((**b).clone())))
        }
        Formula::Iff(a, b) => Formula::and(
            Formula::implies((**a).clone(), (**b).clone()),
            Formula::implies((**b).clone(), (**a).clone()),
        ),
        Formula::Exists(v, body) => Formula::not(Formula::forall(
            v.clone(),
            Formula::not((**body).clone()),
        )),
        _ => return None,
    })
}

fn mismatch(rule: &'static str, reason: impl Into<String>) -> RuleError {
    RuleError::Mismatch {
        rule,
        reason: reason.into(),
    }
}

fn need_hyp(s: &Sequent, rule: &'static str, h: &Formula) -> Result<(), RuleError> {
    if s.has_hyp(h) {
        Ok(())
    } else {
        Err(mismatch(rule, format!("`{h}` is not a hypothesis")))
    }
}

/// Premises of `rule` applied backwards to `s`.
pub fn apply_rule(s: &Sequent, rule: &Rule) -> Result<Vec<Sequent>, RuleError> {
    let name = rule.name();
    let rest = |h: &Formula| s.clone().without_hyp(h);
    match rule {
        Rule::Hyp => {
            need_hyp(s, name, &s.goal)?;
            Ok(vec![])
        }
        Rule::Mon { hyp } => {
            need_hyp(s, name, hyp)?;
            Ok(vec![rest(hyp)])
        }
        Rule::Contr => Ok(vec![Sequent::new(s.hyps.clone(), Formula::False)
            .with_hyp(Formula::not(s.goal.clone()))]),
        Rule::BotHyp => {
            need_hyp(s, name, &Formula::False)?;
            Ok(vec![])
        }
        Rule::NegGoal => match &s.goal {
            Formula::Not(p) => Ok(vec![Sequent::new(s.hyps.clone(), Formula::False).with_hyp((**p).clone())]),
            g => Err(mismatch(name, format!("goal `{g}` is not a negation"))),
        },
        Rule::NegHyp { hyp } => {
            need_hyp(s, name, hyp)?;
            match hyp {
                Formula::Not(p) => Ok(vec![rest(hyp).with_goal((**p).clone())]),
                _ => Err(mismatch(name, format!("`{hyp}` is not a negation"))),
            }
        }
        Rule::AndGoal => match &s.goal {
            Formula::And(p, q) => Ok(vec![
                s.clone().with_goal((**p).clone()),
                s.clone().with_goal((**q).clone()),
            ]),
            g => Err(mismatch(name, format!("goal `{g}` is not a conjunction"))),
        },
        Rule::AndHyp { hyp } => {
            need_hyp(s, name, hyp)?;
            match hyp {
                Formula::And(p, q) => Ok(vec![rest(hyp)
                    .with_hyp((**p).clone())
                    .with_hyp((**q).clone())]),
                _ => Err(mismatch(name, format!("`{hyp}` is not a conjunction"))),
            }
        }
        Rule::AllGoal => match &s.goal {
            Formula::Forall(x, p) => {
                if s.hyps.iter().any(|h| h.free_vars().contains(&x.name)) {
                    return Err(RuleError::SideCondition {
                        rule: name,
                        var: x.name.clone(),
                    });
                }
                Ok(vec![s.clone().with_goal((**p).clone())])
            }
            g => Err(mismatch(name, format!("goal `{g}` is not universally quantified"))),
        },
        Rule::EqGoal => match &s.goal {
            Formula::Eq(a, b) if a == b => Ok(vec![]),
            g => Err(mismatch(name, format!("goal `{g}` is not a reflexive equation"))),
        },
        Rule::EqHyp { eq, var, pattern } => {
            need_hyp(s, name, eq)?;
            let Formula::Eq(e, f) = eq else {
                return Err(mismatch(name, format!("`{eq}` is not an equation")));
            };
            let inst = |t: &Term| {
                Substitution::from_pairs([(var.clone(), t.clone())])
                    .and_then(|sub| sub.apply_formula(pattern))
                    .map_err(|source| RuleError::Subst { rule: name, source })
            };
            if inst(f)? != s.goal {
                return Err(mismatch(
                    name,
                    format!("goal is not `{pattern}` with `{}` replaced by `{f}`", var.name),
                ));
            }
            Ok(vec![rest(eq).with_goal(inst(e)?)])
        }
        Rule::Cut { formula } => Ok(vec![
            Sequent::new(s.hyps.clone(), wd_formula(formula)),
            Sequent::new(s.hyps.clone(), formula.clone()),
            s.clone().with_hyp(formula.clone()),
        ]),
        Rule::AllHyp { hyp, witness } => {
            need_hyp(s, name, hyp)?;
            let Formula::Forall(x, p) = hyp else {
                return Err(mismatch(name, format!("`{hyp}` is not universally quantified")));
            };
            let body = Substitution::from_pairs([(x.clone(), witness.clone())])
                .and_then(|sub| sub.apply_formula(p))
                .map_err(|source| RuleError::Subst { rule: name, source })?;
            let h = rest(hyp);
            Ok(vec![
                Sequent::new(h.hyps.clone(), crate::wd::wd_term(witness)),
                h.with_hyp(body),
            ])
        }
        Rule::GoalWd => Ok(vec![s.clone().with_hyp(wd_formula(&s.goal))]),
        Rule::HypWd { hyp } => {
            need_hyp(s, name, hyp)?;
            Ok(vec![s.clone().with_hyp(wd_formula(hyp))])
        }
        Rule::UnfoldGoal => match unfold(&s.goal) {
            Some(g) => Ok(vec![s.clone().with_goal(g)]),
            None => Err(mismatch(name, "goal has no derived connective at its root")),
        },
        Rule::UnfoldHyp { hyp } => {
            need_hyp(s, name, hyp)?;
            match unfold(hyp) {
                Some(h) => Ok(vec![rest(hyp).with_hyp(h)]),
                None => Err(mismatch(name, format!("`{hyp}` has no derived connective at its root"))),
            }
        }
        Rule::Rewrite(app) => Ok(rewrite_step(s, app)?),
    }
}
