// SPDX-License-Identifier: Apache-2.0

//! Typology templates: the YAML description of edit categories and the
//! question trees asked about each selected span.

mod emit;
pub mod locale;
mod model;
mod parse;
mod validate;

use thiserror::Error;

use crate::diagnostic::Diagnostic;

pub use emit::{create_template, emit_yaml, TemplateSpec};
pub use locale::{builtin_locales, localize_labels, resolve_locale, ResolvedStrings};
pub use model::*;
pub use parse::{parse_template, ParsedTemplate};
pub use validate::{
    is_hex_color, is_identifier, is_typology_name, validate_typology, MAX_QUESTION_DEPTH,
};

#[derive(Debug, Clone, Error)]
pub enum TemplateError {
    #[error("YAML syntax error at line {line}, column {column}: {message}")]
    YamlSyntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid template: {}", summarize_diagnostics(.0))]
    Schema(Vec<Diagnostic>),
    #[error("unknown locale `{0}`")]
    UnknownLocale(String),
}

impl TemplateError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            TemplateError::Schema(d) => d.clone(),
            TemplateError::YamlSyntax {
                line,
                column,
                message,
            } => vec![Diagnostic::error(
                crate::diagnostic::codes::YAML_SYNTAX,
                format!("{line}:{column}"),
                message.clone(),
            )],
            TemplateError::UnknownLocale(code) => {
                vec![Diagnostic::error(
                    crate::diagnostic::codes::UNKNOWN_LOCALE,
                    "config.language",
                    format!("unknown locale `{code}`"),
                )]
            }
        }
    }
}

pub(crate) fn summarize_diagnostics(d: &[Diagnostic]) -> String {
    match d {
        [] => "no diagnostics".to_string(),
        [one] => one.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}
