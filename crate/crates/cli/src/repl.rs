//! Step-wise proof sessions. One command per line; the commands that change
//! the proof are recorded so a session can be saved and replayed.

use std::fmt::Write as _;

use wdrewrite::kernel::{
    auto_discharge, check_tree_against, parse_rule, to_text, AutoFailure, ProofTree, Rule, Sequent, Step,
    Verdict,
};
use wdrewrite::oracle::Bounds;
use wdrewrite::rewrite::{find_applications, rewrite_step, Application, GroupedRule, Schema};
use wdrewrite::syntax::{parse_formula, Formula, Signature};

use crate::seqfile::declare;

pub const HELP: &str = "\
commands:
  sets S, T             declare given sets
  var x : T; y : T      declare variables
  hyps F1; F2           set the hypotheses of the proof
  goal F                start a proof of the current hypotheses |- F
  apps                  list rewrite applications at the focused subgoal
  apply N [SCHEMA]      apply the N-th listed application
  rule NAME [P]...      apply an inference rule to the focused subgoal
  auto                  close every open subgoal automatically
  show                  list the open subgoals
  tree                  print the proof tree
  undo                  take back the last step
  qed                   check the finished proof
  save FILE             write the session's commands as a script";

/// Auto rules are tried at most this deep when the oracle alone fails.
const AUTO_REWRITE_DEPTH: usize = 3;

pub struct Session {
    sig: Signature,
    rules: Vec<GroupedRule>,
    bounds: Bounds,
    hyps: Vec<Formula>,
    tree: Option<ProofTree>,
    history: Vec<(Option<ProofTree>, Vec<Formula>)>,
    /// Commands that succeeded and changed state.
    transcript: Vec<String>,
}

impl Session {
    pub fn new(sig: Signature, rules: Vec<GroupedRule>, bounds: Bounds) -> Self {
        Session {
            sig,
            rules,
            bounds,
            hyps: Vec::new(),
            tree: None,
            history: Vec::new(),
            transcript: Vec::new(),
        }
    }

    pub fn tree(&self) -> Option<&ProofTree> {
        self.tree.as_ref()
    }

    pub fn transcript(&self) -> String {
        self.transcript.iter().map(|l| format!("{l}\n")).collect()
    }

    /// Runs one command, returning its output.
    pub fn exec(&mut self, line: &str) -> Result<String, String> {
        let line = line.trim();
        let (cmd, arg) = match line.split_once(char::is_whitespace) {
            Some((c, a)) => (c, a.trim()),
            None => (line, ""),
        };
        let out = match cmd {
            "help" => Ok(HELP.to_string()),
            "sets" => {
                for s in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    self.sig.add_set(s)?;
                }
                Ok(String::new())
            }
            "var" => declare(&mut self.sig, arg).map(|_| String::new()),
            "hyps" => self.set_hyps(arg),
            "goal" => self.start(arg),
            "apps" => self.apps(),
            "apply" => self.apply(arg),
            "rule" => self.rule(arg),
            "auto" => self.auto(),
            "show" => Ok(self.open_goals()),
            "tree" => self.tree.as_ref().map(|t| to_text(t, &self.sig)).ok_or_else(no_proof),
            "undo" => self.undo(),
            "qed" => self.qed(),
            "save" => return self.save(arg),
            "" => return Ok(String::new()),
            other => Err(format!("unknown command `{other}` (try `help`)")),
        }?;
        if !matches!(cmd, "help" | "apps" | "show" | "tree" | "qed") {
            self.transcript.push(line.to_string());
        }
        Ok(out)
    }

    fn remember(&mut self) {
        self.history.push((self.tree.clone(), self.hyps.clone()));
    }

    fn set_hyps(&mut self, arg: &str) -> Result<String, String> {
        let hyps = arg
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_formula(s, &self.sig).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        self.remember();
        self.hyps = hyps;
        if let Some(t) = &self.tree {
            let goal = t.conclusion.goal.clone();
            self.tree = Some(ProofTree::open(Sequent::new(self.hyps.clone(), goal)));
            return Ok(self.open_goals());
        }
        Ok(String::new())
    }

    fn start(&mut self, arg: &str) -> Result<String, String> {
        let goal = parse_formula(arg, &self.sig).map_err(|e| e.to_string())?;
        self.remember();
        self.tree = Some(ProofTree::open(Sequent::new(self.hyps.clone(), goal)));
        Ok(self.open_goals())
    }

    fn focus(&self) -> Result<(Vec<usize>, &Sequent), String> {
        let t = self.tree.as_ref().ok_or_else(no_proof)?;
        let path = t.open_leaves().into_iter().next().ok_or("no open subgoals")?;
        let s = &t.at(&path).expect("leaf").conclusion;
        Ok((path, s))
    }

    fn applications(&self) -> Result<Vec<Application>, String> {
        let (_, s) = self.focus()?;
        Ok(find_applications(&self.rules, s))
    }

    fn apps(&self) -> Result<String, String> {
        let apps = self.applications()?;
        if apps.is_empty() {
            return Ok("no applicable rules".into());
        }
        let mut out = String::new();
        for (i, a) in apps.iter().enumerate() {
            let _ = writeln!(out, "{}. {a}", i + 1);
        }
        Ok(out.trim_end().to_string())
    }

    fn apply(&mut self, arg: &str) -> Result<String, String> {
        let mut words = arg.split_whitespace();
        let n: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or("usage: apply N [SCHEMA]")?;
        let mut app = self
            .applications()?
            .into_iter()
            .nth(n.wrapping_sub(1))
            .ok_or_else(|| format!("no application {n} (see `apps`)"))?;
        if let Some(w) = words.next() {
            app.schema = Schema::parse(w).ok_or_else(|| format!("unknown schema `{w}`"))?;
        }
        self.step(Rule::Rewrite(Box::new(app)))
    }

    fn rule(&mut self, arg: &str) -> Result<String, String> {
        let (_, s) = self.focus()?;
        let rule = parse_rule(arg, s, &self.sig, &self.rules)?;
        self.step(rule)
    }

    fn step(&mut self, rule: Rule) -> Result<String, String> {
        let (path, s) = self.focus()?;
        let node = ProofTree::by(s.clone(), rule).map_err(|e| e.to_string())?;
        self.remember();
        *self.tree.as_mut().expect("focus").at_mut(&path).expect("leaf") = node;
        Ok(self.open_goals())
    }

    fn auto(&mut self) -> Result<String, String> {
        let t = self.tree.as_ref().ok_or_else(no_proof)?;
        let mut done = t.clone();
        let auto_rules: Vec<GroupedRule> = self.rules.iter().filter(|r| r.auto).cloned().collect();
        for path in t.open_leaves() {
            let leaf = &t.at(&path).expect("leaf").conclusion;
            let closed = close(leaf, &auto_rules, &self.bounds, AUTO_REWRITE_DEPTH).map_err(|f| f.to_string())?;
            *done.at_mut(&path).expect("leaf") = closed;
        }
        self.remember();
        self.tree = Some(done);
        Ok(self.open_goals())
    }

    fn undo(&mut self) -> Result<String, String> {
        let (tree, hyps) = self.history.pop().ok_or("nothing to undo")?;
        self.tree = tree;
        self.hyps = hyps;
        Ok(self.open_goals())
    }

    fn qed(&self) -> Result<String, String> {
        let t = self.tree.as_ref().ok_or_else(no_proof)?;
        match check_tree_against(t, &self.rules) {
            v @ Verdict::Accepted(_) => Ok(format!("qed: {v}")),
            v => Err(format!("proof {v}")),
        }
    }

    fn save(&self, path: &str) -> Result<String, String> {
        if path.is_empty() {
            return Err("usage: save FILE".into());
        }
        std::fs::write(path, self.transcript()).map_err(|e| format!("{path}: {e}"))?;
        Ok(format!("saved {} commands to {path}", self.transcript.len()))
    }

    fn open_goals(&self) -> String {
        let Some(t) = &self.tree else {
            return String::new();
        };
        let leaves = t.open_leaves();
        if leaves.is_empty() {
            return "no open subgoals".into();
        }
        let mut out = format!("{} open subgoal{}", leaves.len(), if leaves.len() == 1 { "" } else { "s" });
        for p in leaves {
            let _ = write!(out, "\n  {}", t.at(&p).expect("leaf").conclusion);
        }
        out
    }
}

fn no_proof() -> String {
    "no proof started (use `goal`)".into()
}

/// Closes `s` with the automatic tactic, rewriting with `rules` when the
/// oracle alone does not succeed.
fn close(s: &Sequent, rules: &[GroupedRule], bounds: &Bounds, depth: usize) -> Result<ProofTree, AutoFailure> {
    let failure = match auto_discharge(s, bounds) {
        Ok(t) => return Ok(t),
        Err(f) => f,
    };
    if depth == 0 || failure.counterexample.is_some() {
        return Err(failure);
    }
    for app in find_applications(rules, s) {
        let Ok(premises) = rewrite_step(s, &app) else {
            continue;
        };
        let children: Result<Vec<ProofTree>, _> =
            premises.iter().map(|p| close(p, rules, bounds, depth - 1)).collect();
        if let Ok(children) = children {
            return Ok(ProofTree {
                conclusion: s.clone(),
                step: Step::Rule(Rule::Rewrite(Box::new(app))),
                children,
            });
        }
    }
    Err(failure)
}

/// Runs `script` line by line, echoing each command. Stops at the first
/// failing command.
pub fn run_script(session: &mut Session, script: &str, json: bool) -> (String, bool) {
    let mut out = String::new();
    for line in script.lines() {
        let cmd = line.trim();
        if cmd.is_empty() || cmd.starts_with('#') {
            continue;
        }
        let r = session.exec(cmd);
        if json {
            let v = match &r {
                Ok(o) => serde_json::json!({ "command": cmd, "ok": true, "output": o }),
                Err(e) => serde_json::json!({ "command": cmd, "ok": false, "error": e }),
            };
            let _ = writeln!(out, "{v}");
        } else {
            let _ = writeln!(out, "> {cmd}");
            match &r {
                Ok(o) if o.is_empty() => {}
                Ok(o) => {
                    let _ = writeln!(out, "{o}");
                }
                Err(e) => {
                    let _ = writeln!(out, "error: {e}");
                }
            }
        }
        if r.is_err() {
            return (out, false);
        }
    }
    (out, true)
}
