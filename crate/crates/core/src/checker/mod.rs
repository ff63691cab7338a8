//! A small explicit-state model checker for regular safety properties of the
//! form `[] phi` with `phi` propositional.
//!
//! The property is turned into a two-state NFA over `2^AP`
//! ([`invariant_nfa`]), composed lazily with a finite transition system
//! ([`product`]), and a forward depth-first search ([`fdfs_solution`]) looks
//! for a reachable accepting product state. The stack at that point is the
//! solution path; its transition labels are the plan.

mod dot;
mod nfa;
mod product;
mod search;
mod ts;

use thiserror::Error;

pub use dot::product_to_dot;
pub use nfa::{invariant_nfa, Nfa, NfaState, Prop};
pub use product::{product, Product, ProductState};
pub use search::{
    extract_tasks, fdfs_solution, fdfs_solution_with_stats, replays, SearchStats, SolutionPath, TieBreak,
};
pub use ts::{LabelSet, StateId, TransitionSystem, MAX_PROPOSITIONS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckerError {
    #[error("atomic propositions differ: transition system {ts:?}, automaton {nfa:?}")]
    PropositionMismatch { ts: Vec<String>, nfa: Vec<String> },
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("action is not in the action set")]
    UnknownAction,
    #[error("label uses propositions outside AP")]
    LabelOutsideAp,
    #[error("{0} propositions exceed the supported maximum")]
    TooManyPropositions(usize),
}
