//! Conditional rewrite rules: matching, applicability and the proof steps
//! that apply a grouped rule to a hypothesis or the goal.

mod apply;
mod classify;
mod matching;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Position, PositionError, SubstError, Substitution, Term, Type, Var};

pub use apply::{application_at, choose_schema, find_applications, rewrite_step};
pub use classify::is_top_level;
pub use matching::{match_term, match_typed};

/// One case `c : r` of a grouped rule, with the name it was declared under.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub cond: Formula,
    pub rhs: Term,
}

/// Flags that enable the simplified proof steps. Apart from
/// `unconditional`, they are only set once the matching obligation has been
/// discharged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleFlags {
    pub unconditional: bool,
    pub case_complete: bool,
    pub top_level_wd: bool,
}

/// Rules sharing one left-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupedRule {
    /// Name of the first case.
    pub name: String,
    /// Given sets of the theory; they behave as type parameters.
    pub sets: Vec<String>,
    /// Variables of the left-hand side, in declaration order.
    pub metavars: Vec<Var>,
    pub lhs: Term,
    pub cases: Vec<Case>,
    pub auto: bool,
    pub flags: RuleFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule `{0}`: the left-hand side must not be a variable")]
    LhsIsVariable(String),
    #[error("rule `{rule}`: condition uses `{var}`, which does not occur in the left-hand side")]
    CondVars { rule: String, var: String },
    #[error("rule `{rule}`: right-hand side uses `{var}`, which does not occur in the left-hand side")]
    RhsVars { rule: String, var: String },
    #[error("rule `{rule}`: left-hand side has type {lhs}, right-hand side has type {rhs}")]
    Type { rule: String, lhs: Type, rhs: Type },
}

impl GroupedRule {
    /// Builds a group, checking that conditions and right-hand sides only use
    /// variables of the left-hand side. A variable left-hand side is allowed
    /// here so that such a rule can still be validated; see
    /// [`GroupedRule::check_lhs`].
    pub fn new(
        name: impl Into<String>,
        sets: Vec<String>,
        lhs: Term,
        cases: Vec<Case>,
        auto: bool,
    ) -> Result<GroupedRule, RuleError> {
        let name = name.into();
        let lv = lhs.free_vars();
        for c in &cases {
            if let Some(v) = c.cond.free_vars().difference(&lv).next() {
                return Err(RuleError::CondVars {
                    rule: c.name.clone(),
                    var: v.clone(),
                });
            }
            if let Some(v) = c.rhs.free_vars().difference(&lv).next() {
                return Err(RuleError::RhsVars {
                    rule: c.name.clone(),
                    var: v.clone(),
                });
            }
            if c.rhs.ty() != lhs.ty() {
                return Err(RuleError::Type {
                    rule: c.name.clone(),
                    lhs: lhs.ty().clone(),
                    rhs: c.rhs.ty().clone(),
                });
            }
        }
        let mut decls = indexmap::IndexMap::new();
        lhs.collect_vars(&mut decls);
        let metavars = decls.into_iter().map(|(n, t)| Var::new(n, t)).collect();
        let unconditional = cases.len() == 1 && cases[0].cond == Formula::True;
        Ok(GroupedRule {
            name,
            sets,
            metavars,
            lhs,
            cases,
            auto,
            flags: RuleFlags {
                unconditional,
                ..RuleFlags::default()
            },
        })
    }

    /// Rewriting with a variable left-hand side is not allowed.
    pub fn check_lhs(&self) -> Result<(), RuleError> {
        if self.lhs.is_var() {
            Err(RuleError::LhsIsVariable(self.name.clone()))
        } else {
            Ok(())
        }
    }

    pub fn case_names(&self) -> impl Iterator<Item = &str> {
        self.cases.iter().map(|c| c.name.as_str())
    }

    /// All variable names in the rule, bound ones included.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.metavars.iter().map(|v| v.name.clone()).collect();
        for c in &self.cases {
            c.cond.all_var_names(&mut out);
            out.extend(c.rhs.free_vars());
        }
        out
    }

    /// The rule with given sets instantiated by `types` and metavariables
    /// renamed by `renaming`.
    pub fn instance(
        &self,
        types: &BTreeMap<String, Type>,
        renaming: &BTreeMap<String, String>,
    ) -> Result<GroupedRule, SubstError> {
        let metavars: Vec<Var> = self
            .metavars
            .iter()
            .map(|v| {
                Var::new(
                    renaming.get(&v.name).cloned().unwrap_or_else(|| v.name.clone()),
                    v.ty.instantiate(types),
                )
            })
            .collect();
        let sigma = Substitution::from_pairs(
            self.metavars
                .iter()
                .zip(&metavars)
                .map(|(old, new)| (Var::new(old.name.clone(), new.ty.clone()), Term::Var(new.clone()))),
        )?;
        let cases = self
            .cases
            .iter()
            .map(|c| {
                Ok(Case {
                    name: c.name.clone(),
                    cond: sigma.apply_formula(&c.cond.instantiate_types(types))?,
                    rhs: sigma.apply_term(&c.rhs.instantiate_types(types)),
                })
            })
            .collect::<Result<_, SubstError>>()?;
        Ok(GroupedRule {
            name: self.name.clone(),
            sets: self.sets.clone(),
            metavars,
            lhs: sigma.apply_term(&self.lhs.instantiate_types(types)),
            cases,
            auto: self.auto,
            flags: self.flags,
        })
    }
}

impl fmt::Display for GroupedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.lhs)?;
        for (i, c) in self.cases.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{} : {}", c.cond, c.rhs)?;
        }
        Ok(())
    }
}

/// Which formula of the sequent is rewritten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    Hyp(usize),
    Goal,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Hyp(i) => write!(f, "hyp {}", i + 1),
            Target::Goal => write!(f, "goal"),
        }
    }
}

/// Shape of the emitted premises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Schema {
    /// WD of the disjunction, the disjunction, then one branch per case.
    General,
    /// The rule's only condition is `true`: a single rewritten premise.
    Unconditional,
    /// The disjunction premise is dropped.
    CaseComplete,
    /// The WD premise is dropped (top-level occurrence).
    TopLevel,
    /// Only the branches remain.
    CaseCompleteTopLevel,
}

impl Schema {
    pub fn name(self) -> &'static str {
        match self {
            Schema::General => "general",
            Schema::Unconditional => "unconditional",
            Schema::CaseComplete => "case-complete",
            Schema::TopLevel => "top-level",
            Schema::CaseCompleteTopLevel => "case-complete-top-level",
        }
    }

    pub fn parse(s: &str) -> Option<Schema> {
        [
            Schema::General,
            Schema::Unconditional,
            Schema::CaseComplete,
            Schema::TopLevel,
            Schema::CaseCompleteTopLevel,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// A located match of a grouped rule.
///
/// `rule` is the library rule instantiated with `types` and renamed apart
/// with `renaming`; `sigma` maps its metavariables so that
/// `sigma(rule.lhs)` is the subterm at `position` of the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Application {
    pub rule: GroupedRule,
    pub types: BTreeMap<String, Type>,
    pub renaming: BTreeMap<String, String>,
    pub target: Target,
    pub position: Position,
    pub sigma: Substitution,
    pub schema: Schema,
}

impl fmt::Display for Application {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {} position {} with {} ({})",
            self.rule.name,
            self.target,
            self.position,
            self.sigma,
            self.schema.name()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no hypothesis {0}")]
    NoSuchHypothesis(usize),
    #[error("the subterm at {position} is not an instance of the rule's left-hand side")]
    NoMatch { position: Position },
    #[error("free variable `{var}` of {what} does not occur free in the rewritten formula")]
    Proviso { var: String, what: String },
    #[error("substitution is conflicting")]
    Conflicting,
    #[error("schema {schema} needs the rule flag `{flag}`, which is not established")]
    FlagMissing { schema: &'static str, flag: &'static str },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error(transparent)]
    Subst(#[from] SubstError),
}
