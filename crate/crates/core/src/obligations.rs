//! Proof obligations that validate grouped rewrite rules, and their
//! discharge by the automatic tactic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kernel::{auto_discharge, check_tree, Confidence, ProofTree, Sequent, Verdict};
use crate::oracle::{Bounds, CheckResult, Checker, Interpretation, Value};
use crate::rewrite::{GroupedRule, RuleFlags};
use crate::theory::{Theory, TheoryError};
use crate::wd::{wd_formula, wd_sequent, wd_term};
use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoKind {
    /// `c ⊢ l = r`
    Validity,
    /// `D(l), c ⊢ D(r)`
    WdPreservation,
    /// `⊢ c1 ∨ … ∨ cn`
    CaseComplete,
    /// `⊢ D(l) ⇒ D(c1) ∧ … ∧ D(cn)`
    TopLevelCondWd,
    /// Well-definedness of another obligation's sequent.
    SequentWd,
}

impl PoKind {
    pub fn name(self) -> &'static str {
        match self {
            PoKind::Validity => "validity",
            PoKind::WdPreservation => "wd-preservation",
            PoKind::CaseComplete => "case-complete",
            PoKind::TopLevelCondWd => "top-level-wd",
            PoKind::SequentWd => "sequent-wd",
        }
    }

    /// Needed before a rule may be deployed.
    pub fn is_mandatory(self) -> bool {
        matches!(self, PoKind::Validity | PoKind::WdPreservation)
    }

    /// Counted in the headline obligation total.
    pub fn is_primary(self) -> bool {
        matches!(self, PoKind::Validity | PoKind::WdPreservation | PoKind::CaseComplete)
    }

    pub fn parse(s: &str) -> Option<PoKind> {
        [
            PoKind::Validity,
            PoKind::WdPreservation,
            PoKind::CaseComplete,
            PoKind::TopLevelCondWd,
            PoKind::SequentWd,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

impl fmt::Display for PoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PoStatus {
    Pending {
        reason: String,
    },
    Discharged {
        confidence: Confidence,
        /// Not persisted; a reloaded record has `None`.
        #[serde(skip)]
        proof: Option<Box<ProofTree>>,
    },
    Refuted {
        counterexample: Interpretation,
    },
}

impl PoStatus {
    pub fn is_discharged(&self) -> bool {
        matches!(self, PoStatus::Discharged { .. })
    }
}

impl fmt::Display for PoStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoStatus::Pending { reason } => write!(f, "pending ({reason})"),
            PoStatus::Discharged { confidence, .. } => write!(f, "discharged ({confidence})"),
            PoStatus::Refuted { counterexample } if counterexample.assignment.is_empty() => f.write_str("refuted"),
            PoStatus::Refuted { counterexample } => write!(f, "refuted: {counterexample}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofObligation {
    pub kind: PoKind,
    /// For [`PoKind::SequentWd`], the kind of the obligation it accompanies.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parent: Option<PoKind>,
    pub rule: String,
    /// Index into the group's cases, for per-case obligations.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<usize>,
    pub sequent: Sequent,
    pub status: PoStatus,
}

impl ProofObligation {
    fn new(kind: PoKind, rule: &GroupedRule, case: Option<usize>, sequent: Sequent) -> Self {
        ProofObligation {
            kind,
            parent: None,
            rule: rule.name.clone(),
            case,
            sequent,
            status: PoStatus::Pending {
                reason: "not attempted".into(),
            },
        }
    }

    fn companion(&self) -> ProofObligation {
        ProofObligation {
            kind: PoKind::SequentWd,
            parent: Some(self.kind),
            rule: self.rule.clone(),
            case: self.case,
            sequent: Sequent::goal(wd_sequent(&self.sequent.hyps, &self.sequent.goal)),
            status: PoStatus::Pending {
                reason: "not attempted".into(),
            },
        }
    }

    /// A label like `validity` or `sequent-wd of validity`.
    pub fn label(&self) -> String {
        match self.parent {
            Some(p) => format!("{} of {p}", self.kind),
            None => self.kind.to_string(),
        }
    }
}

pub fn po_validity(rule: &GroupedRule, case: usize) -> ProofObligation {
    let c = &rule.cases[case];
    let s = Sequent::new([c.cond.clone()], Formula::eq(rule.lhs.clone(), c.rhs.clone()));
    ProofObligation::new(PoKind::Validity, rule, Some(case), s)
}

pub fn po_wd_preservation(rule: &GroupedRule, case: usize) -> ProofObligation {
    let c = &rule.cases[case];
    let s = Sequent::new([wd_term(&rule.lhs), c.cond.clone()], wd_term(&c.rhs));
    ProofObligation::new(PoKind::WdPreservation, rule, Some(case), s)
}

pub fn po_case_complete(rule: &GroupedRule) -> ProofObligation {
    let s = Sequent::goal(Formula::disj(rule.cases.iter().map(|c| c.cond.clone())));
    ProofObligation::new(PoKind::CaseComplete, rule, None, s)
}

pub fn po_top_level(rule: &GroupedRule) -> ProofObligation {
    let conds = Formula::conj(rule.cases.iter().map(|c| wd_formula(&c.cond)));
    let s = Sequent::goal(Formula::implies(wd_term(&rule.lhs), conds));
    ProofObligation::new(PoKind::TopLevelCondWd, rule, None, s)
}

pub fn po_sequent_wd(po: &ProofObligation) -> ProofObligation {
    po.companion()
}

/// Every obligation of a group, each preceded by its sequent-WD companion.
pub fn generate(rule: &GroupedRule) -> Vec<ProofObligation> {
    let mut main = Vec::new();
    for i in 0..rule.cases.len() {
        main.push(po_validity(rule, i));
        main.push(po_wd_preservation(rule, i));
    }
    main.push(po_case_complete(rule));
    main.push(po_top_level(rule));
    main.into_iter().flat_map(|po| [po.companion(), po]).collect()
}

/// Tries the automatic tactic, then the oracle on the whole sequent.
pub fn discharge(s: &Sequent, order: &[String], bounds: &Bounds) -> PoStatus {
    let failure = match auto_discharge(s, bounds) {
        Ok(tree) => return discharged(tree),
        Err(f) => f,
    };
    if let Some(m) = failure.counterexample {
        return PoStatus::Refuted { counterexample: m };
    }
    if failure.inconclusive {
        return PoStatus::Pending { reason: failure.reason };
    }
    // A leaf was refuted but its model does not refute `s` as a whole.
    match Checker::new(bounds).order(order.iter().cloned()).check(&s.hyps, &s.goal) {
        CheckResult::BoundedValid { .. } => discharged(ProofTree::oracle(s.clone(), bounds.clone())),
        CheckResult::Counterexample(m) => PoStatus::Refuted { counterexample: m },
        CheckResult::Unknown(r) => PoStatus::Pending { reason: r },
    }
}

fn discharged(tree: ProofTree) -> PoStatus {
    match check_tree(&tree) {
        Verdict::Accepted(confidence) => PoStatus::Discharged {
            confidence,
            proof: Some(Box::new(tree)),
        },
        v => PoStatus::Pending {
            reason: format!("proof not accepted: {v}"),
        },
    }
}

fn var_order(rule: &GroupedRule) -> Vec<String> {
    rule.metavars.iter().map(|v| v.name.clone()).collect()
}

/// Discharges a group's obligations. A companion is only attempted once
/// the obligation it accompanies is discharged, and that obligation stays
/// pending unless its companion is discharged too.
pub fn discharge_rule(rule: &GroupedRule, bounds: &Bounds) -> RuleReport {
    let order = var_order(rule);
    let mut obligations = generate(rule);
    for k in (1..obligations.len()).step_by(2) {
        let status = discharge(&obligations[k].sequent, &order, bounds);
        if !status.is_discharged() {
            obligations[k - 1].status = PoStatus::Pending {
                reason: format!("skipped: {} is not discharged", obligations[k].kind),
            };
            obligations[k].status = status;
            continue;
        }
        let companion = discharge(&obligations[k - 1].sequent, &order, bounds);
        obligations[k].status = if companion.is_discharged() {
            status
        } else {
            PoStatus::Pending {
                reason: format!("its sequent is not known to be well-defined: {companion}"),
            }
        };
        obligations[k - 1].status = companion;
    }
    RuleReport::new(rule, obligations)
}

/// The group with its flags set from discharged obligations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub rule: GroupedRule,
    pub obligations: Vec<ProofObligation>,
    pub deployable: bool,
}

impl RuleReport {
    fn new(rule: &GroupedRule, obligations: Vec<ProofObligation>) -> Self {
        let done = |k: PoKind| {
            obligations
                .iter()
                .filter(|p| p.kind == k)
                .all(|p| p.status.is_discharged())
        };
        let mut rule = rule.clone();
        rule.flags = RuleFlags {
            unconditional: rule.flags.unconditional,
            case_complete: done(PoKind::CaseComplete),
            top_level_wd: done(PoKind::TopLevelCondWd),
        };
        let deployable = rule.check_lhs().is_ok()
            && obligations
                .iter()
                .filter(|p| p.kind.is_mandatory())
                .all(|p| p.status.is_discharged());
        RuleReport {
            rule,
            obligations,
            deployable,
        }
    }

    pub fn refuted(&self) -> impl Iterator<Item = &ProofObligation> {
        self.obligations
            .iter()
            .filter(|p| p.kind.is_mandatory() && matches!(p.status, PoStatus::Refuted { .. }))
    }

    /// Why the rule cannot be deployed, if it cannot.
    pub fn exclusion_reason(&self) -> Option<String> {
        if let Err(e) = self.rule.check_lhs() {
            return Some(e.to_string());
        }
        let refuted: Vec<String> = self.refuted().map(|p| format!("{} refuted", p.label())).collect();
        if !refuted.is_empty() {
            return Some(refuted.join(", "));
        }
        self.pending().next().map(|p| format!("{} pending", p.label()))
    }

    pub fn pending(&self) -> impl Iterator<Item = &ProofObligation> {
        self.obligations
            .iter()
            .filter(|p| p.kind.is_mandatory() && matches!(p.status, PoStatus::Pending { .. }))
    }
}

/// Outcome of validating every group of a theory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub theory: String,
    pub bounds: Bounds,
    pub rules: Vec<RuleReport>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub total: usize,
    pub discharged: usize,
    pub refuted: usize,
    pub pending: usize,
}

impl Report {
    pub fn obligations(&self) -> impl Iterator<Item = &ProofObligation> {
        self.rules.iter().flat_map(|r| &r.obligations)
    }

    pub fn tally(&self, primary: bool) -> Tally {
        let mut t = Tally::default();
        for po in self.obligations().filter(|p| p.kind.is_primary() == primary) {
            t.total += 1;
            match po.status {
                PoStatus::Discharged { .. } => t.discharged += 1,
                PoStatus::Refuted { .. } => t.refuted += 1,
                PoStatus::Pending { .. } => t.pending += 1,
            }
        }
        t
    }

    /// Every mandatory obligation is discharged.
    pub fn all_valid(&self) -> bool {
        self.rules.iter().all(|r| r.deployable)
    }

    pub fn table(&self) -> String {
        let mut rows = vec![["rule".to_string(), "case".into(), "obligation".into(), "status".into()]];
        for r in &self.rules {
            for po in &r.obligations {
                let case = po.case.map_or("-".to_string(), |i| r.rule.cases[i].name.clone());
                rows.push([po.rule.clone(), case, po.label(), po.status.to_string()]);
            }
        }
        let mut w = [0; 3];
        for row in &rows {
            for (i, c) in row.iter().take(3).enumerate() {
                w[i] = w[i].max(c.chars().count());
            }
        }
        let b = &self.bounds;
        let mut out = format!(
            "theory {} (integers {}..{}, given sets of {}, nesting {})\n",
            self.theory, b.int_lo, b.int_hi, b.given_size, b.max_nesting
        );
        for row in &rows {
            out += &format!(
                "{:w0$}  {:w1$}  {:w2$}  {}\n",
                row[0],
                row[1],
                row[2],
                row[3],
                w0 = w[0],
                w1 = w[1],
                w2 = w[2]
            );
        }
        let p = self.tally(true);
        let a = self.tally(false);
        out += &format!(
            "{} obligations: {} discharged, {} refuted, {} pending (auxiliary: {}/{} discharged)\n",
            p.total, p.discharged, p.refuted, p.pending, a.discharged, a.total
        );
        for r in &self.rules {
            let f = r.rule.flags;
            out += &format!(
                "{}: {}{}{}\n",
                r.rule.name,
                if r.deployable { "deployable" } else { "not deployable" },
                if f.case_complete { ", case-complete" } else { "" },
                if f.top_level_wd { ", top-level" } else { "" },
            );
        }
        out
    }
}

pub fn discharge_groups(theory: &str, groups: &[GroupedRule], bounds: &Bounds) -> Report {
    Report {
        theory: theory.to_string(),
        bounds: bounds.clone(),
        rules: groups.iter().map(|g| discharge_rule(g, bounds)).collect(),
    }
}

pub fn discharge_all(theory: &Theory, bounds: &Bounds) -> Result<Report, TheoryError> {
    Ok(discharge_groups(&theory.name, &theory.groups()?, bounds))
}

/// The group with `case_complete` and `top_level_wd` set according to the
/// two optional obligations.
pub fn classify(rule: &GroupedRule, bounds: &Bounds) -> GroupedRule {
    let order = var_order(rule);
    let ok = |po: ProofObligation| {
        discharge(&po.sequent, &order, bounds).is_discharged()
            && discharge(&po.companion().sequent, &order, bounds).is_discharged()
    };
    let mut r = rule.clone();
    r.flags.case_complete = ok(po_case_complete(rule));
    r.flags.top_level_wd = ok(po_top_level(rule));
    r
}

/// Searches for a model refuting one obligation, with some variables fixed.
pub fn find_rule_counterexample(
    rule: &GroupedRule,
    kind: PoKind,
    case: usize,
    pins: &[(String, Value)],
    bounds: &Bounds,
) -> CheckResult {
    let po = match kind {
        PoKind::Validity => po_validity(rule, case),
        PoKind::WdPreservation => po_wd_preservation(rule, case),
        PoKind::CaseComplete => po_case_complete(rule),
        PoKind::TopLevelCondWd => po_top_level(rule),
        PoKind::SequentWd => po_validity(rule, case).companion(),
    };
    let mut c = Checker::new(bounds).order(var_order(rule));
    for (n, v) in pins {
        c = c.pin(n.clone(), v.clone());
    }
    c.check(&po.sequent.hyps, &po.sequent.goal)
}
