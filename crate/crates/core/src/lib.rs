//! Deductive peer-to-peer databases with weak-model semantics.
//!
//! A system is a set of peers, each with a database, standard rules, integrity
//! constraints and mapping rules that import atoms from other peers. Mapping rules
//! are either maximal (import as much as consistency allows) or minimal (import only
//! what is needed to restore consistency).

pub mod engine;
pub mod gen;
pub mod ground;
pub mod interp;
pub mod netsim;
pub mod parser;
pub mod priority;
pub mod query;
pub mod split;
pub mod syntax;
pub mod totalrw;
pub mod validate;
pub mod weak;

pub use interp::{Interpretation, ModelSet, RoleFilter};
pub use parser::{parse_query, parse_system, parse_system_named, print_system};
pub use syntax::{GroundAtom, P2PSystem, PeerAtom};

/// Errors raised by the semantic layers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] parser::ParseErrors),
    #[error(transparent)]
    Ground(#[from] ground::GroundError),
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Role(#[from] interp::RoleResolutionError),
    #[error("{count} candidate mapping atoms exceed the cap of {cap}")]
    TooManyCandidates { count: usize, cap: usize },
    #[error("wrong semantics for this system: {0}")]
    WrongSemantics(String),
    #[error("outside the supported fragment: {0}")]
    Scope(String),
    #[error("ill-formed priority: {0}")]
    IllFormedPriority(String),
    #[error("rewriting error: {0}")]
    Rewriting(String),
    #[error("cyclic mapping topology ({0}); use the centralized well-founded computation")]
    CyclicTopology(String),
    #[error("peer id space exhausted")]
    PeerOverflow,
}
