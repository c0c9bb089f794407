//! Exact-arithmetic kernel for liftability of semifree DG modules along
//! free extensions of graded-commutative DG algebras.

pub mod connections;
pub mod derivations;
pub mod dgmod;
pub mod enveloping;
pub mod frontend;
pub mod gca;
pub mod lifting;
pub mod linalg;
pub mod par;
pub mod report;
pub mod scalar;
pub mod target;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Gca(#[from] gca::GcaError),
    #[error("invalid {what}: {detail}")]
    Invalid { what: String, detail: String },
    #[error("{0}")]
    Mismatch(String),
    #[error("window: {0}")]
    Window(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
