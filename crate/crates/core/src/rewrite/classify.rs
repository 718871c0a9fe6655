use crate::syntax::{Formula, Position};

/// Whether `p` points into an argument of an atomic formula that sits
/// under negations only.
pub fn is_top_level(f: &Formula, p: &Position) -> bool {
    if f.subterm_at(p).is_err() {
        return false;
    }
    let mut here = f;
    for (k, &i) in p.steps().iter().enumerate() {
        match here {
            Formula::Not(b) if i == 1 => here = b,
            Formula::Pred(..) | Formula::Eq(..) => return k < p.steps().len(),
            _ => return false,
        }
    }
    false
}
