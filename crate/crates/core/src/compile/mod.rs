// SPDX-License-Identifier: Apache-2.0

//! Compilation of a typology plus data into the interface IR, and
//! single-file bundles for hosted deployment.

mod bundle;
mod ir;
mod markdown;

use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::span::Side;

pub use bundle::{bundle, unbundle, Bundle, BundleError, BUNDLE_VERSION};
pub use ir::{
    compile, CompileOptions, InterfaceIr, IrBounds, IrCategory, IrConfig, IrInstance, IrPane,
    IrPaneEntry, IrQuestion, IR_VERSION,
};
pub use markdown::{render_instructions, Block, Inline};

#[derive(Debug, Clone, Error)]
pub enum CompileError {
    #[error("compilation failed: {}", crate::typology::summarize_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("instance `{instance_id}` has no token boundaries for the {side}")]
    MissingBounds { instance_id: String, side: Side },
    #[error("unknown locale `{0}`")]
    UnknownLocale(String),
}

impl CompileError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            CompileError::Invalid(d) => d.clone(),
            CompileError::MissingBounds { instance_id, side } => vec![Diagnostic::error(
                crate::diagnostic::codes::MISSING_BOUNDS,
                format!("instances[{instance_id}].token_bounds_{side}"),
                self.to_string(),
            )],
            CompileError::UnknownLocale(_) => {
                vec![Diagnostic::error(
                    crate::diagnostic::codes::UNKNOWN_LOCALE,
                    "locale",
                    self.to_string(),
                )]
            }
        }
    }
}
