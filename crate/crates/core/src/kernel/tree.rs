use std::fmt;

use serde::{Deserialize, Serialize};

use super::{apply_rule, Rule, Sequent};
use crate::oracle::{check_sequent, Bounds, CheckResult};
use crate::rewrite::GroupedRule;

/// How a node is justified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Step {
    Open,
    Rule(Rule),
    /// Closed by a bounded counterexample search.
    Oracle(Bounds),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub step: Step,
    pub children: Vec<ProofTree>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Confidence {
    Full,
    Bounded,
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Confidence::Full => "full",
            Confidence::Bounded => "bounded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accepted(Confidence),
    /// `path` lists child indices (0-based) from the root.
    Rejected { path: Vec<usize>, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted(c) => write!(f, "accepted ({c} confidence)"),
            Verdict::Rejected { path, reason } => {
                write!(f, "rejected at [")?;
                for (i, p) in path.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]: {reason}")
            }
        }
    }
}

impl ProofTree {
    pub fn open(conclusion: Sequent) -> Self {
        ProofTree {
            conclusion,
            step: Step::Open,
            children: Vec::new(),
        }
    }

    pub fn oracle(conclusion: Sequent, bounds: Bounds) -> Self {
        ProofTree {
            conclusion,
            step: Step::Oracle(bounds),
            children: Vec::new(),
        }
    }

    /// Applies `rule` to this node's conclusion, with open children.
    pub fn by(conclusion: Sequent, rule: Rule) -> Result<Self, super::RuleError> {
        let children = apply_rule(&conclusion, &rule)?
            .into_iter()
            .map(ProofTree::open)
            .collect();
        Ok(ProofTree {
            conclusion,
            step: Step::Rule(rule),
            children,
        })
    }

    /// Paths of the open leaves, depth-first.
    pub fn open_leaves(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_open(&mut Vec::new(), &mut out);
        out
    }

    fn collect_open(&self, here: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if self.step == Step::Open {
            out.push(here.clone());
        }
        for (i, c) in self.children.iter().enumerate() {
            here.push(i);
            c.collect_open(here, out);
            here.pop();
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&ProofTree> {
        path.iter().try_fold(self, |t, &i| t.children.get(i))
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut ProofTree> {
        let mut t = self;
        for &i in path {
            t = t.children.get_mut(i)?;
        }
        Some(t)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn has_oracle_leaf(&self) -> bool {
        matches!(self.step, Step::Oracle(_)) || self.children.iter().any(ProofTree::has_oracle_leaf)
    }

    /// All conclusions, root first.
    pub fn sequents(&self) -> Vec<&Sequent> {
        let mut out = vec![&self.conclusion];
        for c in &self.children {
            out.extend(c.sequents());
        }
        out
    }
}

/// Re-derives every node. Rewrite steps are checked against the rule they
/// carry; see [`check_tree_against`] to also tie them to a rule library.
pub fn check_tree(t: &ProofTree) -> Verdict {
    check(t, None)
}

/// Like [`check_tree`], and every rewrite step must use an instance of a
/// rule in `rules` with the same name and flags.
pub fn check_tree_against(t: &ProofTree, rules: &[GroupedRule]) -> Verdict {
    check(t, Some(rules))
}

fn check(t: &ProofTree, rules: Option<&[GroupedRule]>) -> Verdict {
    let mut path = Vec::new();
    match node(t, rules, &mut path) {
        Ok(()) => Verdict::Accepted(if t.has_oracle_leaf() {
            Confidence::Bounded
        } else {
            Confidence::Full
        }),
        Err(reason) => Verdict::Rejected { path, reason },
    }
}

fn node(t: &ProofTree, rules: Option<&[GroupedRule]>, path: &mut Vec<usize>) -> Result<(), String> {
    match &t.step {
        Step::Open => Err("open subgoal".into()),
        Step::Oracle(bounds) => {
            if !t.children.is_empty() {
                return Err("oracle leaf has children".into());
            }
            match check_sequent(&t.conclusion.hyps, &t.conclusion.goal, bounds) {
                CheckResult::BoundedValid { .. } => Ok(()),
                CheckResult::Counterexample(m) => Err(format!("oracle found a counterexample: {m}")),
                CheckResult::Unknown(r) => Err(format!("oracle inconclusive: {r}")),
            }
        }
        Step::Rule(rule) => {
            if let (Rule::Rewrite(app), Some(lib)) = (rule, rules) {
                let known = lib
                    .iter()
                    .find(|r| r.name == app.rule.name)
                    .ok_or_else(|| format!("unknown rewrite rule `{}`", app.rule.name))?;
                match known.instance(&app.types, &app.renaming) {
                    Ok(inst) if inst == app.rule => {}
                    _ => return Err(format!("rewrite step does not use rule `{}` as deployed", known.name)),
                }
            }
            let premises = apply_rule(&t.conclusion, rule).map_err(|e| e.to_string())?;
            if premises.len() != t.children.len() {
                return Err(format!(
                    "{} yields {} premises, node has {} children",
                    rule.name(),
                    premises.len(),
                    t.children.len()
                ));
            }
            for (i, (p, c)) in premises.iter().zip(&t.children).enumerate() {
                if !p.same(&c.conclusion) {
                    return Err(format!("premise {} should be `{p}`, child proves `{}`", i + 1, c.conclusion));
                }
            }
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                node(c, rules, path)?;
                path.pop();
            }
            Ok(())
        }
    }
}
