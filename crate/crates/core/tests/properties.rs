mod common;

use common::{models, signature, Gen};
use proptest::prelude::*;
use wdrewrite::oracle::{eval2, eval3, Bounds, TriBool};
use wdrewrite::syntax::{parse_formula, parse_term, Formula, Substitution, Term, Type, Var};
use wdrewrite::wd::{wd_formula, wd_term};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn wd_of_a_formula_is_its_definedness(seed in any::<u64>()) {
        let f = Gen::new(seed).formula(3);
        let d = wd_formula(&f);
        for m in models(&Bounds::default()) {
            let defined = eval3(&f, &m).unwrap() != TriBool::U;
            prop_assert_eq!(eval2(&d, &m).unwrap(), defined, "{} under {}", f, m);
            prop_assert_ne!(eval3(&d, &m).unwrap(), TriBool::U);
        }
    }

    #[test]
    fn wd_conditions_are_themselves_defined(seed in any::<u64>()) {
        let f = Gen::new(seed).formula(3);
        let dd = wd_formula(&wd_formula(&f));
        for m in models(&Bounds::default()) {
            prop_assert!(eval2(&dd, &m).unwrap(), "{} under {}", f, m);
        }
    }

    #[test]
    fn wd_of_an_instance(seed in any::<u64>()) {
        let meta = [Var::new("i", Type::Int), Var::new("j", Type::Int)];
        let l = Gen::with_vars(seed, meta.to_vec()).int_term(3);
        let mut g = Gen::new(seed ^ 0x9e37_79b9);
        let vars = l.free_vars();
        let sigma = Substitution::from_pairs(
            meta.iter().filter(|v| vars.contains(&v.name)).map(|v| (v.clone(), g.int_term(2))),
        )
        .unwrap();
        prop_assert!(sigma.is_non_conflicting());
        let lhs = wd_term(&sigma.apply_term(&l));
        let rhs = Formula::and(
            Formula::conj(sigma.ran().into_iter().map(wd_term)),
            sigma.apply_formula(&wd_term(&l)).unwrap(),
        );
        for m in models(&Bounds::default()) {
            prop_assert_eq!(eval2(&lhs, &m).unwrap(), eval2(&rhs, &m).unwrap(), "{} with {}", l, sigma);
        }
    }

    #[test]
    fn formulas_print_and_parse_back(seed in any::<u64>()) {
        let f = Gen::new(seed).formula(4);
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text, &signature()).unwrap(), f, "{}", text);
    }

    #[test]
    fn terms_print_and_parse_back(seed in any::<u64>()) {
        let t = Gen::new(seed).int_term(4);
        let text = t.to_string();
        prop_assert_eq!(parse_term(&text, &signature()).unwrap(), t, "{}", text);
    }

    #[test]
    fn free_variables_are_the_declared_ones(seed in any::<u64>()) {
        let f = Gen::new(seed).formula(4);
        prop_assert!(f.free_vars().iter().all(|v| v == "x" || v == "y"));
        prop_assert!(wd_formula(&f).free_vars().is_subset(&f.free_vars()));
    }

    #[test]
    fn substitution_replaces_every_free_occurrence(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let f = g.formula(3);
        let sigma = Substitution::from_pairs([(Var::new("x", Type::Int), Term::int(2))]).unwrap();
        let g2 = sigma.apply_formula(&f).unwrap();
        prop_assert!(!g2.free_vars().contains("x"));
        for m in models(&Bounds::default()) {
            if m.get("x").and_then(|v| v.as_int()).is_some_and(|i| *i == 2.into()) {
                prop_assert_eq!(eval3(&f, &m).unwrap(), eval3(&g2, &m).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn theories_print_and_parse_back(seed in any::<u64>()) {
        let t = common::theory(seed);
        let text = t.to_string();
        prop_assert_eq!(wdrewrite::theory::parse_theory(&text).unwrap(), t, "{}", text);
    }
}
