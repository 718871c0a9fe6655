use std::collections::{BTreeMap, BTreeSet};

use super::{is_top_level, match_typed, Application, GroupedRule, RewriteError, Schema, Target};
use crate::kernel::Sequent;
use crate::syntax::{Expr, Formula, Node, Position, Term};
use crate::wd::wd_formula;

/// Fresh names for the rule's metavariables that clash with `taken`.
fn rename_apart(rule: &GroupedRule, taken: &BTreeSet<String>) -> BTreeMap<String, String> {
    let mut avoid: BTreeSet<String> = taken.clone();
    avoid.extend(rule.names());
    let mut out = BTreeMap::new();
    for v in &rule.metavars {
        if !taken.contains(&v.name) {
            continue;
        }
        let mut k = 1;
        let fresh = loop {
            let cand = format!("{}_{k}", v.name);
            if !avoid.contains(&cand) {
                break cand;
            }
            k += 1;
        };
        avoid.insert(fresh.clone());
        out.insert(v.name.clone(), fresh);
    }
    out
}

/// The schema used for an occurrence. The top-level variants, which drop
/// the well-definedness subgoal, are only chosen when `drop_wd` is set.
pub fn choose_schema(rule: &GroupedRule, target: &Formula, position: &Position, drop_wd: bool) -> Schema {
    let top = drop_wd && rule.flags.top_level_wd && is_top_level(target, position);
    match (rule.flags.unconditional, rule.flags.case_complete, top) {
        (true, _, _) => Schema::Unconditional,
        (false, true, true) => Schema::CaseCompleteTopLevel,
        (false, true, false) => Schema::CaseComplete,
        (false, false, true) => Schema::TopLevel,
        (false, false, false) => Schema::General,
    }
}

fn target_formula(s: &Sequent, t: Target) -> Result<&Formula, RewriteError> {
    match t {
        Target::Goal => Ok(&s.goal),
        Target::Hyp(i) => s.hyps.get(i).ok_or(RewriteError::NoSuchHypothesis(i)),
    }
}

/// Instantiated conditions and rewritten targets, one per case.
fn instantiate(
    app: &Application,
    target: &Formula,
) -> Result<Vec<(Formula, Formula)>, RewriteError> {
    let here = target.subterm_at(&app.position)?;
    let lhs = app.sigma.apply_term(&app.rule.lhs);
    if here != Node::Term(&lhs) {
        return Err(RewriteError::NoMatch {
            position: app.position.clone(),
        });
    }
    let metas: BTreeSet<String> = app.rule.metavars.iter().map(|v| v.name.clone()).collect();
    if !app.sigma.dom().is_subset(&metas) {
        return Err(RewriteError::Conflicting);
    }
    let fv = target.free_vars();
    let mut out = Vec::new();
    for c in &app.rule.cases {
        let cond = app.sigma.apply_formula(&c.cond)?;
        let rhs: Term = app.sigma.apply_term(&c.rhs);
        for (what, vars) in [("condition", cond.free_vars()), ("right-hand side", rhs.free_vars())] {
            if let Some(v) = vars.difference(&fv).next() {
                return Err(RewriteError::Proviso {
                    var: v.clone(),
                    what: format!("the {what} of `{}`", c.name),
                });
            }
        }
        let rewritten = target.replace_at(&app.position, Expr::Term(rhs))?;
        out.push((cond, rewritten));
    }
    Ok(out)
}

/// Premises produced by applying `app` to `s`, in schema order.
pub fn rewrite_step(s: &Sequent, app: &Application) -> Result<Vec<Sequent>, RewriteError> {
    let flags = app.rule.flags;
    let need = |ok: bool, flag: &'static str| {
        if ok {
            Ok(())
        } else {
            Err(RewriteError::FlagMissing {
                schema: app.schema.name(),
                flag,
            })
        }
    };
    app.rule.check_lhs()?;
    let target = target_formula(s, app.target)?;
    match app.schema {
        Schema::Unconditional => need(flags.unconditional, "unconditional")?,
        Schema::CaseComplete => need(flags.case_complete, "case-complete")?,
        Schema::TopLevel => need(flags.top_level_wd && is_top_level(target, &app.position), "top-level")?,
        Schema::CaseCompleteTopLevel => {
            need(flags.case_complete, "case-complete")?;
            need(flags.top_level_wd && is_top_level(target, &app.position), "top-level")?;
        }
        Schema::General => {}
    }
    let cases = instantiate(app, target)?;
    let branch = |cond: &Formula, rewritten: &Formula, with_cond: bool| match app.target {
        Target::Goal => {
            let base = Sequent::new(s.hyps.clone(), rewritten.clone());
            if with_cond {
                base.with_hyp(cond.clone())
            } else {
                base
            }
        }
        Target::Hyp(i) => {
            let mut hyps = s.hyps.clone();
            hyps.remove(i);
            let mut seq = Sequent::new(hyps, s.goal.clone());
            if with_cond {
                seq = seq.with_hyp(cond.clone());
            }
            seq.with_hyp(rewritten.clone())
        }
    };
    if app.schema == Schema::Unconditional {
        let (c, r) = &cases[0];
        return Ok(vec![branch(c, r, false)]);
    }
    let disj = Formula::disj(cases.iter().map(|(c, _)| c.clone()));
    let mut out = Vec::new();
    if matches!(app.schema, Schema::General | Schema::CaseComplete) {
        out.push(Sequent::new(s.hyps.clone(), wd_formula(&disj)));
    }
    if matches!(app.schema, Schema::General | Schema::TopLevel) {
        out.push(Sequent::new(s.hyps.clone(), disj));
    }
    out.extend(cases.iter().map(|(c, r)| branch(c, r, true)));
    Ok(out)
}

/// Every admissible application of the rules to hypotheses (in order) and
/// then the goal, with the schema chosen by [`choose_schema`].
pub fn find_applications(rules: &[GroupedRule], s: &Sequent) -> Vec<Application> {
    let mut taken = BTreeSet::new();
    for f in s.hyps.iter().chain(std::iter::once(&s.goal)) {
        f.all_var_names(&mut taken);
    }
    let targets = (0..s.hyps.len())
        .map(Target::Hyp)
        .chain(std::iter::once(Target::Goal));
    let mut out = Vec::new();
    for target in targets {
        let f = target_formula(s, target).expect("index in range");
        for (pos, sub) in f.term_positions() {
            for rule in rules {
                if let Some(app) = locate(rule, &taken, target, f, &pos, sub) {
                    if rewrite_step(s, &app).is_ok() {
                        out.push(app);
                    }
                }
            }
        }
    }
    out
}

/// The application of `rule` at one occurrence, before its provisos are
/// checked (that happens in [`rewrite_step`]).
pub fn application_at(
    rule: &GroupedRule,
    s: &Sequent,
    target: Target,
    position: &Position,
) -> Result<Application, RewriteError> {
    let mut taken = BTreeSet::new();
    for f in s.hyps.iter().chain(std::iter::once(&s.goal)) {
        f.all_var_names(&mut taken);
    }
    let f = target_formula(s, target)?;
    let no_match = || RewriteError::NoMatch {
        position: position.clone(),
    };
    let sub = match f.subterm_at(position)? {
        crate::syntax::Node::Term(t) => t,
        _ => return Err(no_match()),
    };
    locate(rule, &taken, target, f, position, sub).ok_or_else(no_match)
}

fn locate(
    rule: &GroupedRule,
    taken: &BTreeSet<String>,
    target: Target,
    f: &Formula,
    pos: &Position,
    sub: &Term,
) -> Option<Application> {
    let renaming = rename_apart(rule, taken);
    let renamed = rule.instance(&BTreeMap::new(), &renaming).ok()?;
    let metas: BTreeSet<String> = renamed.metavars.iter().map(|v| v.name.clone()).collect();
    let (sigma, types) = match_typed(&renamed.lhs, sub, &metas, &rule.sets)?;
    let inst = rule.instance(&types, &renaming).ok()?;
    let schema = choose_schema(&inst, f, pos, false);
    Some(Application {
        rule: inst,
        types,
        renaming,
        target,
        position: pos.clone(),
        sigma,
        schema,
    })
}
