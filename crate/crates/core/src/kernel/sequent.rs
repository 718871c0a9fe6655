use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::Formula;

/// `H ⊢_D G`, always read as well-defined: `D(H), D(G), H ⊢ G`.
///
/// Hypotheses keep their order for printing but behave as a set: duplicates
/// are dropped on insertion and [`Sequent::same`] ignores order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub hyps: Vec<Formula>,
    pub goal: Formula,
}

impl Sequent {
    pub fn new(hyps: impl IntoIterator<Item = Formula>, goal: Formula) -> Self {
        let mut s = Sequent {
            hyps: Vec::new(),
            goal,
        };
        for h in hyps {
            s.push_hyp(h);
        }
        s
    }

    pub fn goal(goal: Formula) -> Self {
        Sequent::new([], goal)
    }

    fn push_hyp(&mut self, h: Formula) {
        if !self.hyps.contains(&h) {
            self.hyps.push(h);
        }
    }

    pub fn with_hyp(mut self, h: Formula) -> Self {
        self.push_hyp(h);
        self
    }

    pub fn without_hyp(mut self, h: &Formula) -> Self {
        self.hyps.retain(|x| x != h);
        self
    }

    pub fn with_goal(mut self, g: Formula) -> Self {
        self.goal = g;
        self
    }

    pub fn has_hyp(&self, h: &Formula) -> bool {
        self.hyps.contains(h)
    }

    /// Equality up to the order of hypotheses.
    pub fn same(&self, other: &Sequent) -> bool {
        self.goal == other.goal
            && self.hyps.len() == other.hyps.len()
            && self.hyps.iter().all(|h| other.has_hyp(h))
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.hyps.iter().chain(std::iter::once(&self.goal))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hyps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.hyps.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.goal)
    }
}
