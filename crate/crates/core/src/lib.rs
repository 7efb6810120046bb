//! Double-pushout graph rewriting for chemical graph grammars, with
//! partial rule composition.
//!
//! Molecules are [`MolGraph`]s with explicit hydrogens. Rules are stored as
//! a single merged graph whose elements carry optional left and right
//! labels. [`compose::compose_all`] enumerates every composite of two rules
//! from their match matrix; [`compose::compose_sequence`] folds whole
//! chains of rules into meta-rules.

pub mod canon;
pub mod chemistry;
pub mod cli;
pub mod compose;
pub mod error;
pub mod graph;
pub mod io;
pub mod morphism;
pub mod rewrite;
pub mod rule;

pub use canon::CanonicalCode;
pub use compose::{
    bind, build_match_matrix, compose, compose_all, compose_sequence, enumerate_matchings,
    find_orders, unbind, MatchMatrix, PartialMatching, RuleSet, Selection,
};
pub use error::{GraphError, ParseError, Rejection, RewriteError};
pub use graph::{ComponentMultiset, Label, MolGraph};
pub use morphism::{enumerate_component_embeddings, enumerate_embeddings, Embedding};
pub use rewrite::{apply_at, check_gluing, find_matches, is_proper, Derivation};
pub use io::{parse_graph, parse_rule, serialize_graph, serialize_rule};
pub use rule::{Rule, RuleEdge, RuleVertex, Violation};
