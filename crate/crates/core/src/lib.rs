//! Rational revision of Horn knowledge bases.
//!
//! A knowledge base is split into immutable rules, updatable ground facts
//! and integrity constraints. Inserting a derived (view) atom means finding
//! changes to the facts that make the atom derivable while keeping the
//! constraints satisfied and changing as little as possible.
//!
//! ```
//! use hornrev::{parse_kb, parse_atom, generalized_revision, Budget};
//!
//! let kb = parse_kb("
//! %% immutable
//! p :- a, b.
//! %% updatable
//! a.
//! %% constraints
//! :- a, c.
//! ").unwrap();
//! let out = generalized_revision(&kb, &parse_atom("p").unwrap(), &Budget::default()).unwrap();
//! assert_eq!(out.chosen().unwrap().to_string(), "+b");
//! ```

pub mod abduction;
pub mod dump;
pub mod error;
pub mod hitting;
pub mod inference;
pub mod kb;
pub mod kernels;
pub mod logic;
pub mod oracle;
pub mod postulates;
pub mod revision;

pub use error::{Budget, Error, Result};
pub use inference::{derives, ic_violations, least_model, sld_tree, GroundProgram, SLDTree};
pub use kb::{parse_atom, parse_clause, parse_kb, serialize_kb, HornClause, KnowledgeBase};
pub use logic::{unify, Atom, Substitution, Term};
pub use revision::{generalized_revision, RevisionResult, Transaction};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/knowledge-bases.md")]
    mod knowledge_bases {}
    #[doc = include_str!("../../../book/src/sld-trees.md")]
    mod sld_trees {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/abduction.md")]
    mod abduction {}
    #[doc = include_str!("../../../book/src/view-updates.md")]
    mod view_updates {}
    #[doc = include_str!("../../../book/src/postulates.md")]
    mod postulates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
