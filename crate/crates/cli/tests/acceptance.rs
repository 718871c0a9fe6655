//! End-to-end acceptance checks. Runs without the test harness and prints
//! one line per criterion; exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::theorems::{check_instance, Context};
use common::trees::{delete, goal_rewriting, hypothesis_rewriting};
use common::{card_group, models, signature, Gen};
use serde_json::Value as Json;
use wdrewrite::kernel::{auto_discharge, check_tree, from_json, from_text, to_json, to_text, ProofTree, Sequent, Verdict};
use wdrewrite::obligations::{discharge_rule, find_rule_counterexample, PoKind, PoStatus};
use wdrewrite::oracle::{eval2, eval3, Bounds, CheckResult, TriBool, Value};
use wdrewrite::rewrite::{application_at, rewrite_step, GroupedRule, Target};
use wdrewrite::syntax::{parse_formula, Formula, Position, Substitution, Type, Var};
use wdrewrite::theory::parse_theory;
use wdrewrite::wd::{wd_formula, wd_term};

type Outcome = Result<String, String>;

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wdrw").chain(args.iter().copied());
    let code = wdrewrite_cli::run(argv, &mut std::io::empty(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn kleene_correspondence() -> Outcome {
    let bounds = Bounds::default();
    let ms = models(&bounds);
    let mut checks = 0;
    for seed in 0..1000 {
        let f = Gen::new(seed).formula(3);
        let d = wd_formula(&f);
        for m in &ms {
            let defined = eval3(&f, m).map_err(|e| format!("{f}: {e}"))? != TriBool::U;
            let claimed = eval2(&d, m).map_err(|e| format!("{d}: {e}"))?;
            ensure(claimed == defined, || format!("seed {seed}: `{f}` under {m}"))?;
            checks += 1;
        }
    }
    Ok(format!("1000 formulas, {checks} model evaluations, 0 violations"))
}

fn wd_idempotence() -> Outcome {
    let ms = models(&Bounds::default());
    for seed in 0..500 {
        let f = Gen::new(seed).formula(3);
        let dd = wd_formula(&wd_formula(&f));
        for m in &ms {
            ensure(eval2(&dd, m).map_err(|e| e.to_string())?, || format!("seed {seed}: `{f}` under {m}"))?;
        }
    }
    Ok(format!("500 formulas x {} models", ms.len()))
}

fn substitution_wd_law() -> Outcome {
    let ms = models(&Bounds::default());
    let meta = [Var::new("i", Type::Int), Var::new("j", Type::Int)];
    for seed in 0..500 {
        let l = Gen::with_vars(seed, meta.to_vec()).int_term(3);
        let vars = l.free_vars();
        let mut g = Gen::new(seed.wrapping_mul(31).wrapping_add(7));
        let sigma = Substitution::from_pairs(
            meta.iter().filter(|v| vars.contains(&v.name)).map(|v| (v.clone(), g.int_term(2))),
        )
        .map_err(|e| e.to_string())?;
        ensure(sigma.is_non_conflicting(), || format!("seed {seed}: conflicting {sigma}"))?;
        let lhs = wd_term(&sigma.apply_term(&l));
        let rhs = Formula::and(
            Formula::conj(sigma.ran().into_iter().map(wd_term)),
            sigma.apply_formula(&wd_term(&l)).map_err(|e| e.to_string())?,
        );
        for m in &ms {
            let (a, b) = (eval2(&lhs, m).map_err(|e| e.to_string())?, eval2(&rhs, m).map_err(|e| e.to_string())?);
            ensure(a == b, || format!("seed {seed}: `{l}` with {sigma} under {m}"))?;
        }
    }
    Ok(format!("500 (substitution, term) pairs x {} models", ms.len()))
}

fn card_rules() -> Outcome {
    let path = repo("theories/card.theory");
    let (code, out, err) = cli(&["--json", "--bounds", "-4..4", "check", path.to_str().unwrap()]);
    ensure(code == 0, || format!("exit {code}: {err}{out}"))?;
    let doc: Json = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let primary = &doc["summary"]["primary"];
    ensure(primary["total"] == 5 && primary["discharged"] == 5, || format!("summary {primary}"))?;
    let mut kinds = std::collections::BTreeMap::new();
    for r in doc["rules"].as_array().unwrap() {
        for po in r["obligations"].as_array().unwrap() {
            if po["parent"].is_null() && po["status"] == "discharged" {
                *kinds.entry(po["kind"].as_str().unwrap().to_string()).or_insert(0) += 1;
            }
        }
    }
    let want = [("case-complete", 1), ("validity", 2), ("wd-preservation", 2)];
    for (k, n) in want {
        ensure(kinds.get(k) == Some(&n), || format!("{k}: {:?}", kinds.get(k)))?;
    }
    Ok("exit 0; 2 validity, 2 wd-preservation, 1 case-complete discharged on -4..4".into())
}

fn unsound_rule(name: &str) -> Result<GroupedRule, String> {
    let src = std::fs::read_to_string(repo("theories/unsound.theory")).map_err(|e| e.to_string())?;
    let groups = parse_theory(&src).and_then(|t| t.groups()).map_err(|e| e.to_string())?;
    groups.into_iter().find(|g| g.name == name).ok_or_else(|| format!("no rule {name}"))
}

fn negative_rules() -> Outcome {
    let int = |i: i64| Value::int(i);
    let div = discharge_rule(&unsound_rule("div_intro")?, &Bounds::default());
    let wd = div.obligations.iter().find(|p| p.kind == PoKind::WdPreservation).unwrap();
    match &wd.status {
        PoStatus::Refuted { counterexample } if counterexample.get("a") == Some(&int(0)) => {}
        s => return Err(format!("div_intro wd-preservation: {s}")),
    }
    ensure(!div.deployable, || "div_intro deployable".into())?;

    let ovl = unsound_rule("ovl_apply")?;
    // The validity obligation cannot be searched exhaustively; a small
    // budget leaves it pending without affecting the refutation.
    let quick = Bounds {
        budget: 200_000,
        ..Bounds::default()
    };
    let r = discharge_rule(&ovl, &quick);
    let wd = r.obligations.iter().find(|p| p.kind == PoKind::WdPreservation).unwrap();
    let found = match &wd.status {
        PoStatus::Refuted { counterexample } if counterexample.get("x") != counterexample.get("z") => {
            counterexample.to_string()
        }
        s => return Err(format!("ovl_apply wd-preservation: {s}")),
    };
    let f = Value::relation([(int(1), int(2)), (int(1), int(3)), (int(2), int(4))]);
    let pinned = find_rule_counterexample(&ovl, PoKind::WdPreservation, 0, &[("f".into(), f.clone())], &Bounds::default());
    let witness = match pinned {
        CheckResult::Counterexample(m) if m.get("f") == Some(&f) && m.get("x") != m.get("z") => m.to_string(),
        r => return Err(format!("no counterexample with f = {f}: {r:?}")),
    };
    Ok(format!("a = 0 refutes div_intro; ovl_apply refuted by {found}; with f pinned: {witness}"))
}

fn theorem_suites() -> Outcome {
    let rule = card_group();
    let mut summary = String::new();
    for (name, ctx) in [("term", Context::Term), ("formula", Context::Formula)] {
        let (mut valid, mut unknown) = (0, 0);
        for seed in 0..200 {
            for o in check_instance(&rule, ctx, 10_000 + seed, &Bounds::default()) {
                match o.result {
                    CheckResult::BoundedValid { .. } => valid += 1,
                    CheckResult::Unknown(_) => unknown += 1,
                    CheckResult::Counterexample(m) => return Err(format!("{name} seed {seed}: {} under {m}", o.sequent)),
                }
            }
        }
        let _ = write!(summary, "{name}: 200 instances, {valid} sequents valid, {unknown} inconclusive; ");
    }
    Ok(summary.trim_end_matches("; ").to_string())
}

fn kernel_fidelity() -> Outcome {
    let mut deleted = 0;
    for (name, d) in [("hypothesis", hypothesis_rewriting()), ("goal", goal_rewriting())] {
        ensure(check_tree(&d.tree).is_accepted(), || format!("{name}: {}", check_tree(&d.tree)))?;
        for path in &d.boxed_wd {
            let parent = &path[..path.len() - 1];
            match check_tree(&delete(&d.tree, path)) {
                Verdict::Rejected { path: at, .. } if at == parent => deleted += 1,
                v => return Err(format!("{name}: deleting {path:?} gave {v}")),
            }
        }
    }
    Ok(format!("both derivations accepted; {deleted} boxed WD deletions rejected at their parent"))
}

fn premises(rule: &GroupedRule, s: &Sequent, target: Target, pos: usize) -> Result<String, String> {
    let app = application_at(rule, s, target, &Position::root().child(pos)).map_err(|e| e.to_string())?;
    let ps = rewrite_step(s, &app).map_err(|e| e.to_string())?;
    Ok(ps.iter().map(|p| format!("{p}\n")).collect())
}

fn golden(name: &str, actual: &str) -> Result<(), String> {
    let expected = std::fs::read_to_string(repo("crates/core/tests/golden").join(name)).map_err(|e| e.to_string())?;
    ensure(actual == expected, || format!("{name}: got\n{actual}"))
}

fn schemas() -> Outcome {
    let f = |t: &str| parse_formula(t, &signature()).unwrap();
    let mut complete = card_group();
    complete.flags.case_complete = true;
    let goal = Sequent::goal(f("card(1..3) = 3"));
    golden("case_complete_goal.txt", &premises(&complete, &goal, Target::Goal, 1)?)?;
    golden("general_goal.txt", &premises(&card_group(), &goal, Target::Goal, 1)?)?;
    let hyp = Sequent::new([f("x /= 0"), f("card(x..y) = 2")], f("x < y"));
    golden("general_hypothesis.txt", &premises(&card_group(), &hyp, Target::Hyp(1), 1)?)?;
    let single = parse_theory("theory singleton\nmetavariables a : INT\nrewrite\n  rule card_singleton: card({a}) -> auto { true : 1 }\nend\n")
        .and_then(|t| t.groups())
        .map_err(|e| e.to_string())?
        .remove(0);
    let ug = Sequent::new([f("y > 0")], f("card({x}) = y"));
    let uh = Sequent::new([f("card({x}) = y")], f("y = 1"));
    golden(
        "unconditional.txt",
        &(premises(&single, &ug, Target::Goal, 1)? + &premises(&single, &uh, Target::Hyp(0), 1)?),
    )?;
    Ok("case-complete, general goal, general hypothesis and unconditional premises match".into())
}

fn round_trips() -> Outcome {
    let sig = signature();
    for seed in 0..1000 {
        let f = Gen::new(seed).formula(4);
        let back = parse_formula(&f.to_string(), &sig).map_err(|e| format!("`{f}`: {e}"))?;
        ensure(back == f, || format!("formula seed {seed}: `{f}`"))?;
    }
    for seed in 0..200 {
        let t = common::theory(seed);
        let back = parse_theory(&t.to_string()).map_err(|e| format!("{t}: {e}"))?;
        ensure(back == t, || format!("theory seed {seed}:\n{t}"))?;
    }
    let mut trees: Vec<ProofTree> = vec![hypothesis_rewriting().tree, goal_rewriting().tree];
    for seed in 0..100 {
        let mut g = Gen::new(seed);
        g.max_binders = 1;
        let s = Sequent::new([g.formula(2)], g.formula(2));
        trees.push(auto_discharge(&s, &Bounds::default()).map_or_else(|e| e.tree, |t| t));
    }
    for t in &trees {
        let text = to_text(t, &sig);
        ensure(from_text(&text, &sig, &[]).ok().as_ref() == Some(t), || format!("tree text:\n{text}"))?;
        ensure(from_json(&to_json(t)).ok().as_ref() == Some(t), || "tree json".into())?;
    }
    Ok(format!("1000 formulas, 200 theories, {} proof trees (text and JSON)", trees.len()))
}

fn repl_script() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path().join("deployed");
    let (d, card) = (d.to_str().unwrap(), repo("theories/card.theory"));
    let (code, out, err) = cli(&["deploy", card.to_str().unwrap(), "--deploy-dir", d]);
    ensure(code == 0, || format!("deploy exit {code}: {out}{err}"))?;
    let saved = dir.path().join("saved.wdrw");
    let script = dir.path().join("proof.wdrw");
    let text = format!("goal card(1..3) = 3\napps\napply 1\nauto\nqed\nsave {}\n", saved.display());
    std::fs::write(&script, text).map_err(|e| e.to_string())?;
    let run = || cli(&["repl", "--deploy-dir", d, "--script", script.to_str().unwrap()]);
    let (c1, first, e1) = run();
    ensure(c1 == 0, || format!("exit {c1}: {first}{e1}"))?;
    ensure(first.contains("qed: accepted"), || first.clone())?;
    let (c2, second, _) = run();
    ensure(c2 == 0 && first == second, || format!("second run differs:\n{second}"))?;
    let mut replay = std::fs::read_to_string(&saved).map_err(|e| e.to_string())?;
    replay.push_str("qed\n");
    std::fs::write(&saved, &replay).map_err(|e| e.to_string())?;
    let (c3, third, _) = cli(&["repl", "--deploy-dir", d, "--script", saved.to_str().unwrap()]);
    ensure(c3 == 0 && third.contains("qed: accepted"), || format!("saved session: {third}"))?;
    Ok(format!("{} output bytes, identical on rerun; saved session replays to qed", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("kleene correspondence", kleene_correspondence),
        ("wd idempotence", wd_idempotence),
        ("substitution wd law", substitution_wd_law),
        ("card rules", card_rules),
        ("negative rules", negative_rules),
        ("rewriting theorems", theorem_suites),
        ("kernel fidelity", kernel_fidelity),
        ("proof-step schemas", schemas),
        ("round trips", round_trips),
        ("repl script", repl_script),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: pass ({secs:.1}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.1}s) {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
