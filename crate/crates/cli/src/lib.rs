//! The `wdrw` command line: validating and deploying theories, one-shot
//! rewriting of a sequent, and an interactive proof session.

pub mod repl;
pub mod seqfile;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};
use wdrewrite::obligations::{discharge_all, PoStatus, ProofObligation, Report};
use wdrewrite::oracle::Bounds;
use wdrewrite::rewrite::{find_applications, rewrite_step, GroupedRule, Schema, Target};
use wdrewrite::syntax::{Position, Signature};
use wdrewrite::theory::{deploy, load_deployed, parse_theory, LoadReport, Theory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wdrw", version, about = "Validate, deploy and use well-definedness preserving rewrite rules")]
pub struct Cli {
    /// Structured output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BoundsArgs {
    /// Integer range as LO..HI.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "LO..HI")]
    pub bounds: Option<String>,
    /// Smallest integer searched
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub int_lo: Option<i64>,
    /// Largest integer searched
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub int_hi: Option<i64>,
    /// Elements per given set.
    #[arg(long, global = true)]
    pub given_size: Option<usize>,
    /// Deepest POW nesting of a variable's type.
    #[arg(long, global = true)]
    pub nesting: Option<usize>,
    /// Evaluation step budget per search.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

impl BoundsArgs {
    pub fn resolve(&self) -> Result<Bounds, String> {
        let mut b = Bounds::default();
        if let Some(r) = &self.bounds {
            let (lo, hi) = r.split_once("..").ok_or_else(|| format!("--bounds expects LO..HI, got `{r}`"))?;
            b.int_lo = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
            b.int_hi = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
        }
        if let Some(v) = self.int_lo {
            b.int_lo = v;
        }
        if let Some(v) = self.int_hi {
            b.int_hi = v;
        }
        if let Some(v) = self.given_size {
            b.given_size = v;
        }
        if let Some(v) = self.nesting {
            b.max_nesting = v;
        }
        if let Some(v) = self.budget {
            b.budget = v;
        }
        b.validate()?;
        Ok(b)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate and discharge the obligations of a theory file.
    Check { theory: PathBuf },
    /// Check a theory and deploy its valid rules.
    Deploy {
        theory: PathBuf,
        #[arg(long, default_value = "deployed")]
        deploy_dir: PathBuf,
    },
    /// Apply a deployed rule to a sequent file and print the premises.
    Rewrite {
        sequent: PathBuf,
        #[arg(long, default_value = "deployed")]
        deploy_dir: PathBuf,
        /// Rule (group) name.
        #[arg(long)]
        rule: Option<String>,
        /// Position inside the target, e.g. `1.2`.
        #[arg(long)]
        position: Option<String>,
        /// `goal` or a 1-based hypothesis number.
        #[arg(long)]
        target: Option<String>,
        /// Override the proof-step schema.
        #[arg(long)]
        schema: Option<String>,
    },
    /// Interactive proof session over the deployed rules.
    Repl {
        #[arg(long, default_value = "deployed")]
        deploy_dir: PathBuf,
        /// Run commands from a file instead of standard input.
        #[arg(long)]
        script: Option<PathBuf>,
    },
}

/// A failed command: the exit code and what to report.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind,
            message: message.into(),
        }
    }

    fn failed(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILED,
            kind,
            message: message.into(),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let json = cli.json;
    let result = cli
        .bounds
        .resolve()
        .map_err(|m| Failure::usage("bounds", m))
        .and_then(|bounds| dispatch(&cli.command, &bounds, json, input, out, err));
    match result {
        Ok(code) => code,
        Err(f) => {
            if json {
                let _ = writeln!(out, "{}", json!({ "error": { "kind": f.kind, "message": f.message } }));
            } else {
                let _ = writeln!(err, "error: {}", f.message);
            }
            f.code
        }
    }
}

fn dispatch(
    cmd: &Command,
    bounds: &Bounds,
    json: bool,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    match cmd {
        Command::Check { theory } => cmd_check(theory, bounds, json, out),
        Command::Deploy { theory, deploy_dir } => cmd_deploy(theory, deploy_dir, bounds, json, out),
        Command::Rewrite {
            sequent,
            deploy_dir,
            rule,
            position,
            target,
            schema,
        } => cmd_rewrite(
            sequent,
            deploy_dir,
            RewriteChoice {
                rule: rule.as_deref(),
                position: position.as_deref(),
                target: target.as_deref(),
                schema: schema.as_deref(),
            },
            json,
            out,
            err,
        ),
        Command::Repl { deploy_dir, script } => cmd_repl(deploy_dir, script.as_deref(), bounds, json, input, out, err),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    let src = read(path)?;
    parse_theory(&src).map_err(|e| Failure::usage("theory", format!("{}: {e}", path.display())))
}

fn check_report(path: &Path, bounds: &Bounds) -> Result<(Theory, Report), Failure> {
    let theory = load_theory(path)?;
    let report = discharge_all(&theory, bounds).map_err(|e| Failure::usage("theory", e.to_string()))?;
    Ok((theory, report))
}

pub fn cmd_check(path: &Path, bounds: &Bounds, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let (_, report) = check_report(path, bounds)?;
    if json {
        let _ = writeln!(out, "{}", pretty(&report_json(&report)));
    } else {
        let _ = write!(out, "{}", report.table());
    }
    Ok(if report.all_valid() { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_deploy(
    path: &Path,
    dir: &Path,
    bounds: &Bounds,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (theory, report) = check_report(path, bounds)?;
    let deployed = deploy(&theory, &report, dir).map_err(|e| match e {
        wdrewrite::theory::DeployError::Io { .. } => Failure::usage("io", e.to_string()),
        _ => Failure::failed("deploy", e.to_string()),
    })?;
    if json {
        let v = json!({
            "theory": deployed.name,
            "artifact": dir.join(format!("{}.json", deployed.name)).display().to_string(),
            "hash": deployed.hash,
            "rules": deployed.rules.iter().map(|r| json!({
                "rule": r.rule.name,
                "auto": r.rule.auto,
                "flags": r.rule.flags,
            })).collect::<Vec<_>>(),
            "excluded": deployed.excluded.iter().map(|x| json!({ "rule": x.rule, "reason": x.reason })).collect::<Vec<_>>(),
        });
        let _ = writeln!(out, "{}", pretty(&v));
    } else {
        let _ = writeln!(
            out,
            "deployed {} to {} ({} rule{})",
            deployed.name,
            dir.join(format!("{}.json", deployed.name)).display(),
            deployed.rules.len(),
            if deployed.rules.len() == 1 { "" } else { "s" }
        );
        for r in &deployed.rules {
            let f = r.rule.flags;
            let mut tags = vec![if r.rule.auto { "auto" } else { "manual" }];
            if f.case_complete {
                tags.push("case-complete");
            }
            if f.top_level_wd {
                tags.push("top-level");
            }
            let _ = writeln!(out, "  {} ({})", r.rule.name, tags.join(", "));
        }
        for x in &deployed.excluded {
            let _ = writeln!(out, "excluded {}: {}", x.rule, x.reason);
        }
    }
    Ok(EXIT_OK)
}

fn load_dir(dir: &Path, err: &mut dyn Write) -> Result<(LoadReport, Signature), Failure> {
    let loaded = if dir.exists() {
        load_deployed(dir).map_err(|e| Failure::usage("io", format!("{}: {e}", dir.display())))?
    } else {
        LoadReport::default()
    };
    for (name, why) in &loaded.stale {
        let _ = writeln!(err, "warning: theory {name} not loaded: {why}");
    }
    let mut sig = Signature::new();
    for t in &loaded.loaded {
        sig.import(&t.theory().base_signature())
            .map_err(|m| Failure::usage("theory", format!("theory {}: {m}", t.name)))?;
    }
    Ok((loaded, sig))
}

/// Optional selections narrowing the candidate applications.
#[derive(Clone, Copy, Debug, Default)]
pub struct RewriteChoice<'a> {
    pub rule: Option<&'a str>,
    pub position: Option<&'a str>,
    pub target: Option<&'a str>,
    pub schema: Option<&'a str>,
}

pub fn cmd_rewrite(
    path: &Path,
    dir: &Path,
    choice: RewriteChoice<'_>,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let (loaded, base) = load_dir(dir, err)?;
    let text = read(path)?;
    let (_, s) = seqfile::parse_sequent_file(&text, &base)
        .map_err(|m| Failure::usage("sequent", format!("{}: {m}", path.display())))?;
    let position: Option<Position> = choice
        .position
        .map(|p| p.parse().map_err(|e| Failure::usage("position", format!("{e}"))))
        .transpose()?;
    let target = choice
        .target
        .map(|t| match t {
            "goal" => Ok(Target::Goal),
            n => n
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .map(|n| Target::Hyp(n - 1))
                .ok_or_else(|| Failure::usage("target", format!("target must be `goal` or a hypothesis number, got `{n}`"))),
        })
        .transpose()?;
    let schema = choice
        .schema
        .map(|w| Schema::parse(w).ok_or_else(|| Failure::usage("schema", format!("unknown schema `{w}`"))))
        .transpose()?;
    let groups: Vec<GroupedRule> = loaded.groups();
    let apps: Vec<_> = find_applications(&groups, &s)
        .into_iter()
        .filter(|a| choice.rule.is_none_or(|r| a.rule.name == r))
        .filter(|a| position.as_ref().is_none_or(|p| a.position == *p))
        .filter(|a| target.is_none_or(|t| a.target == t))
        .collect();
    let mut app = match apps.len() {
        0 => return Err(Failure::failed("rewrite", "no applicable rules")),
        1 => apps.into_iter().next().expect("one"),
        _ => {
            let list: Vec<String> = apps.iter().map(|a| format!("  {a}")).collect();
            return Err(Failure::failed(
                "rewrite",
                format!("ambiguous: {} applications, select with --rule/--target/--position:\n{}", list.len(), list.join("\n")),
            ));
        }
    };
    if let Some(sc) = schema {
        app.schema = sc;
    }
    let premises = rewrite_step(&s, &app).map_err(|e| Failure::failed("rewrite", e.to_string()))?;
    if json {
        let v = json!({
            "application": {
                "rule": app.rule.name,
                "target": app.target.to_string(),
                "position": app.position.to_string(),
                "substitution": app.sigma.to_string(),
                "schema": app.schema.name(),
            },
            "premises": premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        let _ = writeln!(out, "{}", pretty(&v));
    } else {
        let _ = writeln!(out, "{app}");
        for p in &premises {
            let _ = writeln!(out, "  {p}");
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_repl(
    dir: &Path,
    script: Option<&Path>,
    bounds: &Bounds,
    json: bool,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let (loaded, sig) = load_dir(dir, err)?;
    let mut session = repl::Session::new(sig, loaded.groups(), bounds.clone());
    if let Some(path) = script {
        let text = read(path)?;
        let (log, ok) = repl::run_script(&mut session, &text, json);
        let _ = write!(out, "{log}");
        return Ok(if ok { EXIT_OK } else { EXIT_FAILED });
    }
    let mut line = String::new();
    loop {
        if !json {
            let _ = write!(out, "wdrw> ");
            let _ = out.flush();
        }
        line.clear();
        match input.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => return Err(Failure::usage("io", e.to_string())),
        }
        let cmd = line.trim();
        if matches!(cmd, "quit" | "exit") {
            break;
        }
        let (log, _) = repl::run_script(&mut session, cmd, json);
        // Interactive output leaves out the echoed command.
        let shown = if json { log.as_str() } else { log.split_once('\n').map_or("", |x| x.1) };
        let _ = write!(out, "{shown}");
    }
    Ok(EXIT_OK)
}

fn pretty(v: &Json) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

fn po_json(r: &GroupedRule, po: &ProofObligation) -> Json {
    let mut v = json!({
        "rule": po.rule,
        "case": po.case.map(|i| i + 1),
        "case_name": po.case.map(|i| r.cases[i].name.clone()),
        "kind": po.kind.name(),
        "parent": po.parent.map(|k| k.name()),
        "sequent": po.sequent.to_string(),
    });
    let o = v.as_object_mut().expect("object");
    match &po.status {
        PoStatus::Discharged { confidence, .. } => {
            o.insert("status".into(), "discharged".into());
            o.insert("confidence".into(), confidence.to_string().into());
        }
        PoStatus::Refuted { counterexample } => {
            o.insert("status".into(), "refuted".into());
            let m: serde_json::Map<String, Json> = counterexample
                .assignment
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string().into()))
                .collect();
            o.insert("counterexample".into(), m.into());
        }
        PoStatus::Pending { reason } => {
            o.insert("status".into(), "pending".into());
            o.insert("reason".into(), reason.clone().into());
        }
    }
    v
}

/// The report as a JSON document.
pub fn report_json(report: &Report) -> Json {
    let p = report.tally(true);
    let a = report.tally(false);
    json!({
        "theory": report.theory,
        "bounds": report.bounds,
        "ok": report.all_valid(),
        "summary": { "primary": p, "auxiliary": a },
        "rules": report.rules.iter().map(|r| json!({
            "rule": r.rule.name,
            "cases": r.rule.case_names().collect::<Vec<_>>(),
            "deployable": r.deployable,
            "flags": r.rule.flags,
            "obligations": r.obligations.iter().map(|po| po_json(&r.rule, po)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}
