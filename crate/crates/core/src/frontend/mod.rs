//! Instance-description language, command dispatch with JSON reports, and
//! a seeded random instance generator.

mod ast;
mod commands;
mod elaborate;
pub mod fixtures;
mod parse;
mod print;
mod random;

pub use ast::{AlgebraDecl, DerivationDecl, Document, Expr, FieldSpec, GenDecl, ModuleDecl};
pub use commands::{run_command, Along, CommandOptions, CommandOutput, VERBS};
pub use elaborate::{elaborate, Instance};
pub use parse::{parse_expr, parse_instance, ParseError};
pub use print::{print_expr, print_instance};
pub use random::{generate_random_instance, Profile};

use thiserror::Error;

use crate::Error as KernelError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{context}: {message}")]
    Elaborate { context: String, message: String },
    #[error(transparent)]
    Kernel(KernelError),
}

impl FrontendError {
    /// Process exit code: 1 validation failure, 2 parse error, 3 resource
    /// limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            FrontendError::Parse(_) | FrontendError::Elaborate { .. } => 2,
            FrontendError::Kernel(KernelError::ResourceLimit(_)) => 3,
            FrontendError::Kernel(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FrontendError::Parse(_) => "parse",
            FrontendError::Elaborate { .. } => "elaboration",
            FrontendError::Kernel(e) => match e {
                KernelError::ResourceLimit(_) => "resource-limit",
                KernelError::Hypothesis(_) => "hypothesis",
                KernelError::Window(_) => "window",
                KernelError::Mismatch(_) => "usage",
                KernelError::Internal(_) => "internal",
                KernelError::Gca(_) | KernelError::Invalid { .. } => "invalid",
            },
        }
    }
}

impl From<KernelError> for FrontendError {
    fn from(e: KernelError) -> Self {
        FrontendError::Kernel(e)
    }
}

/// Parses and elaborates a document.
pub fn load(text: &str) -> Result<(Document, Instance), FrontendError> {
    let doc = parse_instance(text)?;
    let inst = elaborate(&doc)?;
    Ok((doc, inst))
}
