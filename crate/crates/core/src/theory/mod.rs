//! Theories: given sets, metavariables, user function symbols and rewrite
//! rules, with a text format and a deployment format that carries the
//! outcome of rule validation.

mod deploy;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewrite::{match_term, Case, GroupedRule, RuleError};
use crate::syntax::{FunctionSymbol, Formula, ParseError, Signature, SubstError, Substitution, Term, Var};

pub use deploy::{deploy, load_deployed, DeployError, DeployedRule, DeployedTheory, Exclusion, LoadReport};
pub use parse::parse_theory;

/// One `rule` declaration as written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDecl {
    pub name: String,
    pub lhs: Term,
    pub auto: bool,
    pub cases: Vec<(Formula, Term)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub name: String,
    pub sets: Vec<String>,
    pub metavariables: Vec<Var>,
    pub functions: Vec<FunctionSymbol>,
    pub rules: Vec<RuleDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Decl(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("rule `{rule}`: {source}")]
    Subst { rule: String, source: SubstError },
}

impl Theory {
    /// Sets, functions and metavariables, in that order.
    pub fn signature(&self) -> Signature {
        let mut sig = self.base_signature();
        for v in &self.metavariables {
            sig.add_variable(v.name.clone(), v.ty.clone())
                .expect("validated on parse");
        }
        sig
    }

    /// Sets and functions only, for reading sequents that use the theory.
    pub fn base_signature(&self) -> Signature {
        let mut sig = Signature::new();
        for s in &self.sets {
            sig.add_set(s.clone()).expect("validated on parse");
        }
        for f in &self.functions {
            sig.add_function(f.clone()).expect("validated on parse");
        }
        sig
    }

    /// Groups declarations whose left-hand sides are equal up to a renaming
    /// of metavariables, in order of first declaration.
    pub fn groups(&self) -> Result<Vec<GroupedRule>, TheoryError> {
        let mut groups: Vec<GroupedRule> = Vec::new();
        for d in &self.rules {
            let cases: Vec<Case> = d
                .cases
                .iter()
                .enumerate()
                .map(|(i, (c, r))| Case {
                    name: case_name(d, i),
                    cond: c.clone(),
                    rhs: r.clone(),
                })
                .collect();
            let fresh = GroupedRule::new(d.name.clone(), self.sets.clone(), d.lhs.clone(), cases, d.auto)?;
            let mut merged = false;
            for g in groups.iter_mut() {
                let Some(back) = renaming(g, &d.lhs) else {
                    continue;
                };
                if g.auto != d.auto {
                    return Err(TheoryError::Decl(format!(
                        "rules `{}` and `{}` share a left-hand side but differ in auto/manual",
                        g.name, d.name
                    )));
                }
                let subst = |source| TheoryError::Subst {
                    rule: d.name.clone(),
                    source,
                };
                let mut cases = g.cases.clone();
                for c in &fresh.cases {
                    cases.push(Case {
                        name: c.name.clone(),
                        cond: back.apply_formula(&c.cond).map_err(subst)?,
                        rhs: back.apply_term(&c.rhs),
                    });
                }
                *g = GroupedRule::new(g.name.clone(), g.sets.clone(), g.lhs.clone(), cases, g.auto)?;
                merged = true;
                break;
            }
            if !merged {
                groups.push(fresh);
            }
        }
        Ok(groups)
    }
}

fn case_name(d: &RuleDecl, i: usize) -> String {
    if d.cases.len() == 1 {
        d.name.clone()
    } else {
        format!("{}.{}", d.name, i + 1)
    }
}

/// A substitution taking `lhs`'s variables back to the group's, when `lhs`
/// is the group's left-hand side up to a bijective renaming.
fn renaming(g: &GroupedRule, lhs: &Term) -> Option<Substitution> {
    let metas = g.metavars.iter().map(|v| v.name.clone()).collect();
    let sigma = match_term(&g.lhs, lhs, &metas)?;
    let mut back = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in &g.metavars {
        let image = match sigma.get(&v.name) {
            Some(Term::Var(w)) => w.clone(),
            Some(_) => return None,
            None => v.clone(),
        };
        if !seen.insert(image.name.clone()) {
            return None;
        }
        back.push((image, Term::Var(v.clone())));
    }
    Substitution::from_pairs(back).ok()
}

fn write_cond(f: &mut fmt::Formatter<'_>, c: &Formula) -> fmt::Result {
    let text = c.to_string();
    if text.contains(':') {
        write!(f, "({text})")
    } else {
        f.write_str(&text)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {}", self.name)?;
        if !self.sets.is_empty() {
            writeln!(f, "sets {}", self.sets.join(", "))?;
        }
        if !self.metavariables.is_empty() {
            let ms: Vec<String> = self
                .metavariables
                .iter()
                .map(|v| format!("{} : {}", v.name, v.ty))
                .collect();
            writeln!(f, "metavariables {}", ms.join("; "))?;
        }
        if !self.functions.is_empty() {
            writeln!(f, "functions")?;
            for fun in &self.functions {
                let ps: Vec<String> = fun.params.iter().map(|p| format!("{} : {}", p.name, p.ty)).collect();
                write!(f, "  {}({}) : {} wd ", fun.name, ps.join(", "), fun.result)?;
                write_cond(f, &fun.wd)?;
                if let Some(b) = &fun.body {
                    write!(f, " body {b}")?;
                }
                writeln!(f, ";")?;
            }
        }
        writeln!(f, "rewrite")?;
        for r in &self.rules {
            write!(
                f,
                "  rule {}: {} -> {} {{ ",
                r.name,
                r.lhs,
                if r.auto { "auto" } else { "manual" }
            )?;
            for (i, (c, rhs)) in r.cases.iter().enumerate() {
                if i > 0 {
                    write!(f, "; ")?;
                }
                write_cond(f, c)?;
                write!(f, " : {rhs}")?;
            }
            writeln!(f, " }}")?;
        }
        writeln!(f, "end")
    }
}
