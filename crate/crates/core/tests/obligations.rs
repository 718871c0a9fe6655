mod common;

use wdrewrite::obligations::{discharge_all, discharge_rule, find_rule_counterexample, PoKind, PoStatus};
use wdrewrite::oracle::{Bounds, CheckResult, Value};
use wdrewrite::rewrite::GroupedRule;
use wdrewrite::theory::parse_theory;

const UNSOUND: &str = include_str!("../../../theories/unsound.theory");

fn unsound(name: &str) -> GroupedRule {
    parse_theory(UNSOUND)
        .unwrap()
        .groups()
        .unwrap()
        .into_iter()
        .find(|g| g.name == name)
        .unwrap()
}

fn int(i: i64) -> Value {
    Value::int(i)
}

#[test]
fn card_rules_discharge_on_a_wider_range() {
    let bounds = Bounds {
        int_lo: -4,
        int_hi: 4,
        ..Bounds::default()
    };
    let report = discharge_all(&parse_theory(common::CARD).unwrap(), &bounds).unwrap();
    let t = report.tally(true);
    assert_eq!((t.total, t.discharged), (5, 5));
    assert!(report.all_valid());
    let g = &report.rules[0].rule;
    assert!(g.flags.case_complete && g.flags.top_level_wd);
}

#[test]
fn self_division_is_not_wd_preserving() {
    let r = discharge_rule(&unsound("div_intro"), &Bounds::default());
    assert!(!r.deployable);
    let po = r.obligations.iter().find(|p| p.kind == PoKind::WdPreservation).unwrap();
    match &po.status {
        PoStatus::Refuted { counterexample } => assert_eq!(counterexample.get("a"), Some(&int(0))),
        s => panic!("{s}"),
    }
}

#[test]
fn override_rule_loses_functionality() {
    let rule = unsound("ovl_apply");
    match find_rule_counterexample(&rule, PoKind::WdPreservation, 0, &[], &Bounds::default()) {
        CheckResult::Counterexample(m) => assert_ne!(m.get("x"), m.get("z"), "{m}"),
        r => panic!("{r:?}"),
    }
    let f = Value::relation([(int(1), int(2)), (int(1), int(3)), (int(2), int(4))]);
    match find_rule_counterexample(&rule, PoKind::WdPreservation, 0, &[("f".into(), f.clone())], &Bounds::default()) {
        CheckResult::Counterexample(m) => {
            assert_eq!(m.get("f"), Some(&f));
            assert_eq!(m.get("x"), Some(&int(2)));
            assert_eq!(m.get("z"), Some(&int(1)));
        }
        r => panic!("{r:?}"),
    }
}
