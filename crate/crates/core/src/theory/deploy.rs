use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{parse_theory, Theory};
use crate::obligations::{PoKind, PoStatus, ProofObligation, Report};
use crate::oracle::Bounds;
use crate::rewrite::GroupedRule;

/// A validated rule with its obligation record (statuses, counterexamples,
/// no proof trees).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeployedRule {
    pub rule: GroupedRule,
    pub obligations: Vec<ProofObligation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub rule: String,
    pub reason: String,
    pub refuted: Vec<ProofObligation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeployedTheory {
    pub name: String,
    /// The theory in its text format.
    pub source: String,
    pub bounds: Bounds,
    pub rules: Vec<DeployedRule>,
    pub excluded: Vec<Exclusion>,
    /// Hex SHA-256 of the artifact; not part of the JSON document.
    #[serde(skip)]
    pub hash: String,
}

impl DeployedTheory {
    pub fn theory(&self) -> Theory {
        parse_theory(&self.source).expect("deployed source parses")
    }

    pub fn groups(&self) -> Vec<GroupedRule> {
        self.rules.iter().map(|r| r.rule.clone()).collect()
    }

    /// Rules the automatic prover may use without being asked.
    pub fn auto_rules(&self) -> Vec<GroupedRule> {
        self.rules.iter().filter(|r| r.rule.auto).map(|r| r.rule.clone()).collect()
    }
}

#[derive(Debug, Error)]
pub enum DeployError {
    #[error("cannot deploy `{theory}`: obligations still pending:\n{}", .pending.join("\n"))]
    Pending { theory: String, pending: Vec<String> },
    #[error("report is for theory `{report}`, not `{theory}`")]
    WrongReport { theory: String, report: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DeployError + '_ {
    move |source| DeployError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `<dir>/<name>.json` and `<dir>/<name>.sha256`. Rules with a
/// refuted mandatory obligation are left out and listed; a pending one
/// blocks deployment.
pub fn deploy(theory: &Theory, report: &Report, dir: &Path) -> Result<DeployedTheory, DeployError> {
    if report.theory != theory.name {
        return Err(DeployError::WrongReport {
            theory: theory.name.clone(),
            report: report.theory.clone(),
        });
    }
    let pending: Vec<String> = report
        .rules
        .iter()
        .filter(|r| r.refuted().next().is_none() && r.rule.check_lhs().is_ok())
        .flat_map(|r| r.pending())
        .map(|po| format!("  {} {}: {}", po.rule, po.label(), po.status))
        .collect();
    if !pending.is_empty() {
        return Err(DeployError::Pending {
            theory: theory.name.clone(),
            pending,
        });
    }
    let mut rules = Vec::new();
    let mut excluded = Vec::new();
    for r in &report.rules {
        if r.deployable {
            let obligations = r
                .obligations
                .iter()
                .map(|po| ProofObligation {
                    status: match &po.status {
                        PoStatus::Discharged { confidence, .. } => PoStatus::Discharged {
                            confidence: *confidence,
                            proof: None,
                        },
                        s => s.clone(),
                    },
                    ..po.clone()
                })
                .collect();
            rules.push(DeployedRule {
                rule: r.rule.clone(),
                obligations,
            });
        } else {
            excluded.push(Exclusion {
                rule: r.rule.name.clone(),
                reason: r.exclusion_reason().unwrap_or_default(),
                refuted: r.refuted().cloned().collect(),
            });
        }
    }
    let mut out = DeployedTheory {
        name: theory.name.clone(),
        source: theory.to_string(),
        bounds: report.bounds.clone(),
        rules,
        excluded,
        hash: String::new(),
    };
    let json = serde_json::to_string_pretty(&out).expect("serializable") + "\n";
    out.hash = sha256_hex(json.as_bytes());
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let jp = dir.join(format!("{}.json", theory.name));
    fs::write(&jp, &json).map_err(io_err(&jp))?;
    let hp = dir.join(format!("{}.sha256", theory.name));
    fs::write(&hp, format!("{}\n", out.hash)).map_err(io_err(&hp))?;
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct LoadReport {
    pub loaded: Vec<DeployedTheory>,
    /// Theory name and why it was not loaded.
    pub stale: Vec<(String, String)>,
}

impl LoadReport {
    pub fn groups(&self) -> Vec<GroupedRule> {
        self.loaded.iter().flat_map(DeployedTheory::groups).collect()
    }
}

/// Reads every deployed theory in `dir`, in name order. Artifacts whose hash
/// file is missing or disagrees are reported stale rather than loaded.
pub fn load_deployed(dir: &Path) -> io::Result<LoadReport> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = LoadReport::default();
    for p in paths {
        let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let bytes = fs::read(&p)?;
        let hash = sha256_hex(&bytes);
        let recorded = fs::read_to_string(p.with_extension("sha256")).unwrap_or_default();
        if recorded.trim() != hash {
            out.stale.push((name, "content hash does not match; re-run validation".into()));
            continue;
        }
        match serde_json::from_slice::<DeployedTheory>(&bytes) {
            Ok(mut t) if consistent(&t) => {
                t.hash = hash;
                out.loaded.push(t);
            }
            Ok(_) => out.stale.push((name, "soundness record is inconsistent".into())),
            Err(e) => out.stale.push((name, format!("unreadable artifact: {e}"))),
        }
    }
    Ok(out)
}

/// Flags are backed by discharged obligations and the source still parses.
fn consistent(t: &DeployedTheory) -> bool {
    if parse_theory(&t.source).is_err() {
        return false;
    }
    t.rules.iter().all(|r| {
        let done = |k: PoKind| {
            let mut pos = r.obligations.iter().filter(|p| p.kind == k).peekable();
            pos.peek().is_some() && pos.all(|p| p.status.is_discharged())
        };
        (!r.rule.flags.case_complete || done(PoKind::CaseComplete))
            && (!r.rule.flags.top_level_wd || done(PoKind::TopLevelCondWd))
            && done(PoKind::Validity)
            && done(PoKind::WdPreservation)
    })
}
