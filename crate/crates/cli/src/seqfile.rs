//! Sequent files: `hyp:` and `goal:` lines, with `sets:` and `var:` lines
//! declaring what the formulas mention. `#` starts a comment line.
//!
//! ```text
//! var: i : INT; j : INT
//! hyp: i <= j
//! goal: card(i..j) = j - i + 1
//! ```

use wdrewrite::kernel::Sequent;
use wdrewrite::syntax::{parse_formula, parse_type, Signature};

pub fn parse_sequent_file(text: &str, base: &Signature) -> Result<(Signature, Sequent), String> {
    let mut sig = base.clone();
    let mut hyps = Vec::new();
    let mut goal = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |m: String| format!("line {}: {m}", i + 1);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err("expected `hyp:`, `goal:`, `var:` or `sets:`".into()))?;
        let rest = rest.trim();
        match key.trim() {
            "sets" => {
                for s in rest.split([',', ';']).map(str::trim).filter(|s| !s.is_empty()) {
                    sig.add_set(s).map_err(err)?;
                }
            }
            "var" => declare(&mut sig, rest).map_err(err)?,
            "hyp" => hyps.push(parse_formula(rest, &sig).map_err(|e| err(e.to_string()))?),
            "goal" => {
                if goal.is_some() {
                    return Err(err("more than one `goal:` line".into()));
                }
                goal = Some(parse_formula(rest, &sig).map_err(|e| err(e.to_string()))?);
            }
            other => return Err(err(format!("unknown line kind `{other}`"))),
        }
    }
    let goal = goal.ok_or("no `goal:` line")?;
    Ok((sig, Sequent::new(hyps, goal)))
}

/// Declares `x : T; y : T` into `sig`.
pub fn declare(sig: &mut Signature, text: &str) -> Result<(), String> {
    for d in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (n, t) = d
            .split_once(':')
            .ok_or_else(|| format!("expected `name : TYPE`, got `{d}`"))?;
        let ty = parse_type(t.trim(), sig).map_err(|e| e.to_string())?;
        sig.declare_variable(n.trim(), ty)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_declarations_and_sequent() {
        let (sig, s) = parse_sequent_file(
            "# example\nvar: i : INT; j : INT\nhyp: i <= j\ngoal: card(i..j) = j - i + 1\n",
            &Signature::new(),
        )
        .unwrap();
        assert_eq!(sig.variables.len(), 2);
        assert_eq!(s.to_string(), "i <= j |- card(i..j) = j - i + 1");
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_sequent_file("goal: x = 1\n", &Signature::new()).unwrap_err();
        assert!(e.starts_with("line 1:"), "{e}");
        assert!(parse_sequent_file("hyp: true\n", &Signature::new()).is_err());
    }
}
