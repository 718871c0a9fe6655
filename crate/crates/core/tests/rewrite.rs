mod common;

use std::path::Path;

use common::theorems::{check_instance, Context};
use common::{card_group, signature, CARD};
use wdrewrite::kernel::Sequent;
use wdrewrite::oracle::{Bounds, CheckResult};
use wdrewrite::rewrite::{application_at, rewrite_step, GroupedRule, Schema, Target};
use wdrewrite::syntax::{parse_formula, Position};
use wdrewrite::theory::parse_theory;

const SINGLETON: &str = "theory singleton
metavariables a : INT
rewrite
  rule card_singleton: card({a}) -> auto { true : 1 }
end
";

fn sequent(hyps: &[&str], goal: &str) -> Sequent {
    let f = |t: &str| parse_formula(t, &signature()).unwrap();
    Sequent::new(hyps.iter().map(|h| f(h)), f(goal))
}

fn premises(rule: &GroupedRule, s: &Sequent, target: Target, pos: &[usize], schema: Option<Schema>) -> String {
    let pos = pos.iter().fold(Position::root(), |p, &i| p.child(i));
    let mut app = application_at(rule, s, target, &pos).unwrap();
    if let Some(k) = schema {
        app.schema = k;
    }
    rewrite_step(s, &app)
        .unwrap()
        .iter()
        .map(|p| format!("{p}\n"))
        .collect()
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let expected = std::fs::read_to_string(&path).unwrap_or_default();
    assert_eq!(actual, expected, "{}", path.display());
}

fn established(mut g: GroupedRule) -> GroupedRule {
    g.flags.case_complete = true;
    g
}

#[test]
fn case_complete_goal() {
    let s = sequent(&[], "card(1..3) = 3");
    golden("case_complete_goal.txt", &premises(&established(card_group()), &s, Target::Goal, &[1], None));
}

#[test]
fn general_goal() {
    let s = sequent(&[], "card(1..3) = 3");
    golden("general_goal.txt", &premises(&card_group(), &s, Target::Goal, &[1], None));
}

#[test]
fn general_hypothesis() {
    let s = sequent(&["x /= 0", "card(x..y) = 2"], "x < y");
    golden("general_hypothesis.txt", &premises(&card_group(), &s, Target::Hyp(1), &[1], None));
}

#[test]
fn unconditional_goal_and_hypothesis() {
    let rule = parse_theory(SINGLETON).unwrap().groups().unwrap().remove(0);
    let goal = sequent(&["y > 0"], "card({x}) = y");
    let hyp = sequent(&["card({x}) = y"], "y = 1");
    let out = premises(&rule, &goal, Target::Goal, &[1], None) + &premises(&rule, &hyp, Target::Hyp(0), &[1], None);
    golden("unconditional.txt", &out);
}

#[test]
fn top_level_schema_needs_its_flag() {
    let s = sequent(&[], "card(1..3) = 3");
    let mut app = application_at(&card_group(), &s, Target::Goal, &Position::root().child(1)).unwrap();
    app.schema = Schema::TopLevel;
    assert!(rewrite_step(&s, &app).is_err());
}

fn run_suite(ctx: fn() -> Context, n: u64) {
    let rule = card_group();
    for seed in 0..n {
        for o in check_instance(&rule, ctx(), seed, &Bounds::default()) {
            assert!(
                !matches!(o.result, CheckResult::Counterexample(_)),
                "seed {seed}: {} has a counterexample: {:?}",
                o.sequent,
                o.result
            );
        }
    }
}

#[test]
fn rewriting_inside_terms_preserves_value_and_definedness() {
    run_suite(|| Context::Term, 100);
}

#[test]
fn rewriting_inside_formulas_preserves_truth_and_definedness() {
    run_suite(|| Context::Formula, 100);
}

#[test]
fn card_theory_prints_back() {
    let t = parse_theory(CARD).unwrap();
    assert_eq!(t.to_string(), CARD);
}
