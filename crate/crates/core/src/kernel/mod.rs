//! The well-definedness preserving sequent calculus: inference rules,
//! proof trees, a checker and a small automatic tactic.

mod auto;
mod rules;
mod sequent;
mod text;
mod tree;

pub use auto::{auto_discharge, AutoFailure};
pub use rules::{apply_rule, unfold, Rule, RuleError};
pub use sequent::Sequent;
pub use text::{from_json, from_text, parse_rule, parse_sequent, to_json, to_text, TextError};
pub use tree::{check_tree, check_tree_against, Confidence, ProofTree, Step, Verdict};
