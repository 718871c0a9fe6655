//! Line-oriented proof-tree format.
//!
//! ```text
//! sets: S
//! vars: a : INT; b : INT
//! cut [a / b = 2] :: b = 1 |- a = 2
//!   oracle [-3] [3] [3] [2] [10000000] :: b = 1 |- b /= 0
//!   open :: b = 1 |- a / b = 2
//!   hyp :: b = 1; a / b = 2 |- a = 2
//! ```
//!
//! Children are indented two spaces under their parent. Parameters are
//! bracketed; hypotheses are separated by `;`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{ProofTree, Rule, Sequent, Step};
use crate::oracle::Bounds;
use crate::rewrite::{application_at, GroupedRule, Schema, Target};
use crate::syntax::{parse_formula, parse_term, parse_type, Formula, Signature, Type, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct TextError {
    pub line: usize,
    pub msg: String,
}

fn collect_types(f: &Formula, sets: &mut Vec<String>) {
    for t in f.free_var_decls().values() {
        t.given_sets(sets);
    }
    if let Formula::Forall(v, b) | Formula::Exists(v, b) = f {
        v.ty.given_sets(sets);
        collect_types(b, sets);
    }
}

/// Renders `t`; `sig` supplies given sets that the header should declare.
pub fn to_text(t: &ProofTree, sig: &Signature) -> String {
    let mut sets = sig.sets.clone();
    let mut vars: indexmap::IndexMap<String, Type> = indexmap::IndexMap::new();
    for s in t.sequents() {
        for f in s.formulas() {
            for (n, ty) in f.free_var_decls() {
                vars.entry(n).or_insert(ty);
            }
            collect_types(f, &mut sets);
        }
    }
    let mut seen = Vec::new();
    sets.retain(|s| {
        let fresh = !seen.contains(s);
        seen.push(s.clone());
        fresh
    });
    let mut out = String::new();
    if !sets.is_empty() {
        let _ = writeln!(out, "sets: {}", sets.join("; "));
    }
    if !vars.is_empty() {
        let decls: Vec<String> = vars.iter().map(|(n, t)| format!("{n} : {t}")).collect();
        let _ = writeln!(out, "vars: {}", decls.join("; "));
    }
    write_node(t, 0, &mut out);
    out
}

fn write_node(t: &ProofTree, depth: usize, out: &mut String) {
    let _ = write!(out, "{:indent$}", "", indent = depth * 2);
    match &t.step {
        Step::Open => out.push_str("open"),
        Step::Oracle(b) => {
            let _ = write!(
                out,
                "oracle [{}] [{}] [{}] [{}] [{}]",
                b.int_lo, b.int_hi, b.given_size, b.max_nesting, b.budget
            );
        }
        Step::Rule(r) => write_rule(r, out),
    }
    let hyps: Vec<String> = t.conclusion.hyps.iter().map(|h| h.to_string()).collect();
    let _ = write!(out, " :: {}", hyps.join("; "));
    if !hyps.is_empty() {
        out.push(' ');
    }
    let _ = writeln!(out, "|- {}", t.conclusion.goal);
    for c in &t.children {
        write_node(c, depth + 1, out);
    }
}

fn write_rule(r: &Rule, out: &mut String) {
    out.push_str(r.name());
    let _ = match r {
        Rule::EqHyp { eq, var, pattern } => write!(out, " [{eq}] [{} : {}] [{pattern}]", var.name, var.ty),
        Rule::Rewrite(app) => {
            let target = match app.target {
                Target::Goal => "goal".to_string(),
                Target::Hyp(i) => format!("hyp {}", i + 1),
            };
            write!(
                out,
                " [{}] [{target}] [{}] [{}]",
                app.rule.name,
                app.position,
                app.schema.name()
            )
        }
        other => write!(out, "{}", &other.to_string()[other.name().len()..]),
    };
}

/// Parses the format written by [`to_text`]. Rewrite steps are resolved
/// against `rules`.
pub fn from_text(text: &str, sig: &Signature, rules: &[GroupedRule]) -> Result<ProofTree, TextError> {
    let mut sig = sig.clone();
    let mut nodes: Vec<(usize, usize, ProofTree)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| TextError { line, msg };
        if raw.trim().is_empty() || raw.trim_start().starts_with("//") {
            continue;
        }
        if let Some(rest) = raw.strip_prefix("sets:") {
            for s in rest.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                if !sig.sets.iter().any(|x| x == s) {
                    sig.add_set(s).map_err(err)?;
                }
            }
            continue;
        }
        if let Some(rest) = raw.strip_prefix("vars:") {
            for d in rest.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (n, t) = d
                    .split_once(':')
                    .ok_or_else(|| err(format!("bad declaration `{d}`")))?;
                let ty = parse_type(t.trim(), &sig).map_err(|e| err(e.to_string()))?;
                sig.declare_variable(n.trim(), ty).map_err(err)?;
            }
            continue;
        }
        let body = raw.trim_start();
        let indent = raw.len() - body.len();
        if indent % 2 != 0 {
            return Err(err("indentation must be a multiple of two spaces".into()));
        }
        let (step, seq) = body
            .split_once(" :: ")
            .ok_or_else(|| err("expected `STEP :: SEQUENT`".into()))?;
        let conclusion = parse_sequent(seq, &sig).map_err(err)?;
        let step = parse_step(step.trim(), &conclusion, &sig, rules).map_err(err)?;
        nodes.push((
            indent / 2,
            line,
            ProofTree {
                conclusion,
                step,
                children: Vec::new(),
            },
        ));
    }
    assemble(nodes)
}

fn assemble(nodes: Vec<(usize, usize, ProofTree)>) -> Result<ProofTree, TextError> {
    let mut stack: Vec<(usize, ProofTree)> = Vec::new();
    let mut root: Option<ProofTree> = None;
    let fold = |stack: &mut Vec<(usize, ProofTree)>, root: &mut Option<ProofTree>, to: usize| {
        while stack.len() > to {
            let (_, t) = stack.pop().expect("non-empty");
            match stack.last_mut() {
                Some((_, parent)) => parent.children.push(t),
                None => *root = Some(t),
            }
        }
    };
    for (depth, line, t) in nodes {
        if depth == 0 && (root.is_some() || !stack.is_empty()) {
            return Err(TextError {
                line,
                msg: "more than one root".into(),
            });
        }
        if depth > stack.len() {
            return Err(TextError {
                line,
                msg: "indented more than one level below its parent".into(),
            });
        }
        fold(&mut stack, &mut root, depth);
        stack.push((depth, t));
    }
    fold(&mut stack, &mut root, 0);
    root.ok_or(TextError {
        line: 0,
        msg: "no proof tree".into(),
    })
}

/// Parses `h1; h2 |- g`.
pub fn parse_sequent(text: &str, sig: &Signature) -> Result<Sequent, String> {
    let padded = format!(" {}", text.trim());
    let at = padded
        .find(" |- ")
        .or_else(|| padded.strip_suffix(" |-").map(|s| s.len()))
        .ok_or_else(|| format!("expected `|-` in `{}`", text.trim()))?;
    let (hyps, goal) = (&padded[..at], &padded[at + 4..]);
    let f = |s: &str| parse_formula(s, sig).map_err(|e| e.to_string());
    let hyps = hyps
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sequent::new(hyps, f(goal)?))
}

/// Parses a rule as written in a tree node, e.g. `cut [b /= 0]` or
/// `rewrite [card_range] [goal] [1] [case-complete]`.
pub fn parse_rule(text: &str, conclusion: &Sequent, sig: &Signature, rules: &[GroupedRule]) -> Result<Rule, String> {
    match parse_step(text.trim(), conclusion, sig, rules)? {
        Step::Rule(r) => Ok(r),
        _ => Err(format!("`{}` is not an inference rule", text.trim())),
    }
}

fn params(text: &str) -> Result<(&str, Vec<&str>), String> {
    let (name, mut rest) = match text.find(' ') {
        Some(i) => (&text[..i], text[i..].trim_start()),
        None => (text, ""),
    };
    let mut out = Vec::new();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('[')
            .ok_or_else(|| format!("expected `[` in parameters of `{name}`"))?;
        let close = inner
            .find(']')
            .ok_or_else(|| format!("unclosed parameter of `{name}`"))?;
        out.push(inner[..close].trim());
        rest = inner[close + 1..].trim_start();
    }
    Ok((name, out))
}

fn parse_step(
    text: &str,
    conclusion: &Sequent,
    sig: &Signature,
    rules: &[GroupedRule],
) -> Result<Step, String> {
    let (name, ps) = params(text)?;
    let arity = |n: usize| {
        if ps.len() == n {
            Ok(())
        } else {
            Err(format!("`{name}` takes {n} parameters, got {}", ps.len()))
        }
    };
    let f = |s: &str| parse_formula(s, sig).map_err(|e| e.to_string());
    let num = |s: &str| s.parse::<i64>().map_err(|e| format!("`{s}`: {e}"));
    let rule = match name {
        "open" => {
            arity(0)?;
            return Ok(Step::Open);
        }
        "oracle" => {
            arity(5)?;
            return Ok(Step::Oracle(Bounds {
                int_lo: num(ps[0])?,
                int_hi: num(ps[1])?,
                given_size: num(ps[2])? as usize,
                max_nesting: num(ps[3])? as usize,
                budget: num(ps[4])? as u64,
            }));
        }
        "hyp" | "contr" | "botHyp" | "negGoal" | "andGoal" | "allGoal" | "eqGoal" | "goalWD"
        | "unfoldGoal" => {
            arity(0)?;
            match name {
                "hyp" => Rule::Hyp,
                "contr" => Rule::Contr,
                "botHyp" => Rule::BotHyp,
                "negGoal" => Rule::NegGoal,
                "andGoal" => Rule::AndGoal,
                "allGoal" => Rule::AllGoal,
                "eqGoal" => Rule::EqGoal,
                "goalWD" => Rule::GoalWd,
                _ => Rule::UnfoldGoal,
            }
        }
        "mon" | "negHyp" | "andHyp" | "hypWD" | "unfoldHyp" | "cut" => {
            arity(1)?;
            let x = f(ps[0])?;
            match name {
                "mon" => Rule::Mon { hyp: x },
                "negHyp" => Rule::NegHyp { hyp: x },
                "andHyp" => Rule::AndHyp { hyp: x },
                "hypWD" => Rule::HypWd { hyp: x },
                "unfoldHyp" => Rule::UnfoldHyp { hyp: x },
                _ => Rule::Cut { formula: x },
            }
        }
        "eqHyp" => {
            arity(3)?;
            let (v, t) = ps[1]
                .split_once(':')
                .ok_or_else(|| format!("expected `x : TYPE`, got `{}`", ps[1]))?;
            let var = Var::new(v.trim(), parse_type(t.trim(), sig).map_err(|e| e.to_string())?);
            let mut inner = sig.clone();
            inner.variables.insert(var.name.clone(), var.ty.clone());
            Rule::EqHyp {
                eq: f(ps[0])?,
                pattern: parse_formula(ps[2], &inner).map_err(|e| e.to_string())?,
                var,
            }
        }
        "allHyp" => {
            arity(2)?;
            Rule::AllHyp {
                hyp: f(ps[0])?,
                witness: parse_term(ps[1], sig).map_err(|e| e.to_string())?,
            }
        }
        "rewrite" => {
            arity(4)?;
            let target = match ps[1] {
                "goal" => Target::Goal,
                h => Target::Hyp(
                    h.strip_prefix("hyp ")
                        .and_then(|n| n.trim().parse::<usize>().ok())
                        .filter(|n| *n >= 1)
                        .ok_or_else(|| format!("bad rewrite target `{h}`"))?
                        - 1,
                ),
            };
            let position = ps[2].parse()?;
            let schema = Schema::parse(ps[3]).ok_or_else(|| format!("unknown schema `{}`", ps[3]))?;
            let rule = rules
                .iter()
                .find(|r| r.name == ps[0])
                .ok_or_else(|| format!("unknown rewrite rule `{}`", ps[0]))?;
            let mut app = application_at(rule, conclusion, target, &position).map_err(|e| e.to_string())?;
            app.schema = schema;
            Rule::Rewrite(Box::new(app))
        }
        other => return Err(format!("unknown rule `{other}`")),
    };
    Ok(Step::Rule(rule))
}

pub fn to_json(t: &ProofTree) -> String {
    serde_json::to_string_pretty(t).expect("proof trees serialize")
}

pub fn from_json(text: &str) -> Result<ProofTree, serde_json::Error> {
    serde_json::from_str(text)
}
