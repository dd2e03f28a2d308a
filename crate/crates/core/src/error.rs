use thiserror::Error;

use crate::kb::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid knowledge base: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("clause `{0}` has variables but the grounding universe is empty")]
    EmptyUniverse(String),

    #[error("{what} needs {needed} candidates, over the budget of {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("program is cyclic: {}", .0.join(" -> "))]
    Cyclic(Vec<String>),

    #[error("SLD tree has cut-off branches at depth bound {0}")]
    CutOff(usize),

    #[error("{0}")]
    Precondition(String),

    #[error("no consistent repair: {0}")]
    NoRepair(String),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Enumeration limits for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of candidate subsets any single enumeration may visit.
    pub subsets: u128,
    /// Maximum number of candidate sets for the relevance postulate searches.
    pub relevance: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            subsets: 1 << 20,
            relevance: 1 << 16,
        }
    }
}

impl Budget {
    /// A budget where both limits are `n`.
    pub fn uniform(n: u128) -> Budget {
        Budget {
            subsets: n,
            relevance: n,
        }
    }

    /// Reads `HORNREV_BUDGET`, falling back to the default when unset or
    /// unparsable.
    pub fn from_env() -> Budget {
        std::env::var("HORNREV_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .map(Budget::uniform)
            .unwrap_or_default()
    }

    pub(crate) fn check_subsets(&self, what: &'static str, elements: usize) -> Result<()> {
        check(what, elements, self.subsets)
    }

    pub(crate) fn check_relevance(&self, what: &'static str, elements: usize) -> Result<()> {
        check(what, elements, self.relevance)
    }
}

fn check(what: &'static str, elements: usize, limit: u128) -> Result<()> {
    let needed = if elements >= 127 { u128::MAX } else { 1u128 << elements };
    if needed > limit {
        Err(Error::BudgetExceeded {
            what,
            needed,
            limit,
        })
    } else {
        Ok(())
    }
}
