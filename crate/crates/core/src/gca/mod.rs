//! Free graded-commutative DG algebras with Koszul signs.

mod algebra;
mod element;

pub use algebra::{format_terms, substitute, Algebra, Degree, Generator, Part};
pub use element::{Element, Monomial};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcaError {
    #[error("generator index {0} is out of range")]
    UnknownGenerator(usize),
    #[error("generator `{0}` belongs to the base algebra")]
    NotExtensionGenerator(String),
    #[error("generator `{0}` is declared twice")]
    DuplicateName(String),
    #[error("generator `{0}` has degree {1}; degrees must be at least 1")]
    NonPositiveDegree(String, i32),
}
