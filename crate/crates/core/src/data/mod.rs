// SPDX-License-Identifier: Apache-2.0

//! The unified annotation format: instance files, per-annotator annotation
//! files, validation against a typology, and multi-file merge.

mod annotation;
mod check;
mod instance;
mod merge;

use thiserror::Error;

use crate::diagnostic::Diagnostic;

pub use annotation::{
    edit_to_json, parse_annotation_document, parse_annotations, serialize_annotations,
    AnnotationSet, Answer, AnswerValue, Edit, InstanceAnnotations,
};
pub use check::{check_annotation_set, check_instance_bounds};
pub use instance::{parse_instances, Instance};
pub use merge::{
    merge_annotations, merge_sets, parse_annotation_sets, serialize_collection,
    AnnotationCollection,
};

pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Clone, Error)]
pub enum DataError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate instance id `{0}`")]
    DuplicateId(String),
    #[error("invalid annotations: {}", crate::typology::summarize_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("file {index}: {source}")]
    InFile {
        index: usize,
        source: Box<DataError>,
    },
}

impl DataError {
    /// Diagnostics view of the error, for uniform reporting.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        use crate::diagnostic::codes;
        match self {
            DataError::Json {
                line,
                column,
                message,
            } => {
                vec![Diagnostic::error(
                    crate::diagnostic::codes::JSON_SYNTAX,
                    format!("{line}:{column}"),
                    message.clone(),
                )]
            }
            DataError::Schema { path, message } => vec![Diagnostic::error(
                codes::SCHEMA,
                path.clone(),
                message.clone(),
            )],
            DataError::DuplicateId(id) => {
                vec![Diagnostic::error(
                    codes::DUP_ID,
                    id.clone(),
                    format!("duplicate instance id `{id}`"),
                )]
            }
            DataError::Invalid(d) => d.clone(),
            DataError::InFile { index, source } => source
                .diagnostics()
                .into_iter()
                .map(|mut d| {
                    d.path = if d.path.is_empty() {
                        format!("file[{index}]")
                    } else {
                        format!("file[{index}]:{}", d.path)
                    };
                    d
                })
                .collect(),
        }
    }
}

pub(crate) fn json_error(e: serde_path_to_error::Error<serde_json::Error>) -> DataError {
    let inner = e.inner();
    if inner.is_syntax() || inner.is_eof() {
        return DataError::Json {
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        };
    }
    let path = e.path().to_string();
    DataError::Schema {
        path: if path == "." { String::new() } else { path },
        message: e.into_inner().to_string(),
    }
}
