//! The two rewriting derivations, instantiated with the card rule
//! `card(i..j) -> j - i + 1` under `i <= j` and `sigma = {i := x, j := y}`,
//! inside the context `8 / [] > 0`.

use wdrewrite::kernel::{apply_rule, ProofTree, Rule, Sequent, Step};
use wdrewrite::oracle::Bounds;
use wdrewrite::syntax::{parse_formula, Formula};
use wdrewrite::wd::wd_formula;

use super::signature;

pub struct Derivation {
    pub tree: ProofTree,
    /// Paths of the boxed premises: the conditions under which the rewrite
    /// is justified.
    pub boxed: Vec<Vec<usize>>,
    /// Paths of the boxed well-definedness premises.
    pub boxed_wd: Vec<Vec<usize>>,
}

pub fn f(text: &str) -> Formula {
    parse_formula(text, &signature()).unwrap()
}

fn oracle(s: Sequent) -> ProofTree {
    ProofTree::oracle(s, Bounds::default())
}

/// `s` by `rule`, each premise closed by `close(index, premise)`.
fn derive(s: Sequent, rule: Rule, close: impl Fn(usize, Sequent) -> ProofTree) -> ProofTree {
    let premises = apply_rule(&s, &rule).unwrap();
    ProofTree {
        conclusion: s,
        step: Step::Rule(rule),
        children: premises.into_iter().enumerate().map(|(i, p)| close(i, p)).collect(),
    }
}

/// `sigma(c), phi[sigma(l)] |- R`: cut on the rewritten hypothesis.
pub fn hypothesis_rewriting() -> Derivation {
    let c = f("x <= y");
    let phi_l = f("8 / card(x..y) > 0");
    let phi_r = f("8 / (y - x + 1) > 0");
    let goal = f("y - x + 1 > 0");
    let s = Sequent::new([c, phi_l.clone()], goal);
    let tree = derive(s, Rule::Cut { formula: phi_r }, |i, p| match i {
        0 => derive(p, Rule::HypWd { hyp: phi_l.clone() }, |_, q| oracle(q)),
        1 => oracle(p),
        _ => derive(p, Rule::Mon { hyp: phi_l.clone() }, |_, q| oracle(q)),
    });
    Derivation {
        tree,
        boxed: vec![vec![0, 0], vec![1]],
        boxed_wd: vec![vec![0, 0]],
    }
}

/// `sigma(c) |- phi[sigma(l)]`: assume the goal's well-definedness, then cut
/// on the rewritten goal.
pub fn goal_rewriting() -> Derivation {
    let c = f("x <= y");
    let phi_l = f("8 / card(x..y) > 0");
    let phi_r = f("8 / (y - x + 1) > 0");
    let d_l = wd_formula(&phi_l);
    let s = Sequent::new([c], phi_l);
    let tree = derive(s, Rule::GoalWd, |_, p| {
        derive(p, Rule::Cut { formula: phi_r.clone() }, |i, q| match i {
            1 => derive(q, Rule::Mon { hyp: d_l.clone() }, |_, r| oracle(r)),
            _ => oracle(q),
        })
    });
    Derivation {
        tree,
        boxed: vec![vec![0, 0], vec![0, 2]],
        boxed_wd: vec![vec![0, 0]],
    }
}

/// `t` with the subtree at `path` removed from its parent.
pub fn delete(t: &ProofTree, path: &[usize]) -> ProofTree {
    let mut out = t.clone();
    let (last, parent) = path.split_last().expect("non-root path");
    out.at_mut(parent).expect("path exists").children.remove(*last);
    out
}
