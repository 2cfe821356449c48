//! Model-theoretic kernel.

mod hcf;
mod program;
mod solve;
mod store;
mod wfs;

pub use hcf::{head_cycle, shift, stable_models_disjunctive_hcf};
pub use program::{expand_xor, Body, Head, Program, Rule};
pub(crate) use solve::{body_true, stable_truths, Horn};
pub use solve::{check_constraints, is_stable_model, minimal_model_positive, stable_models_normal};
pub use store::{AtomId, AtomTable, DisjunctiveProgram, DisjunctiveRule, NormalProgram, NormalRule};
pub use wfs::{well_founded, WellFoundedResult};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("program is not positive: {0}")]
    NotPositive(String),
    #[error("program is not head-cycle-free: {0} and {1} share a head and a positive cycle")]
    NotHcf(String, String),
    #[error("rule does not have an exclusive-disjunction head")]
    NotXor,
}
