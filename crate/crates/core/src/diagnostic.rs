// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A single finding produced by validation.
///
/// `code` is stable across releases and is what scripts should match on;
/// `path` points into the offending document (`edits[2].questions[0]`,
/// `instances[1].edits[0].target[0]`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code: code.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn warning(code: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code: code.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        if self.path.is_empty() {
            write!(f, "{sev}[{}]: {}", self.code, self.message)
        } else {
            write!(f, "{sev}[{}] at {}: {}", self.code, self.path, self.message)
        }
    }
}

/// Stable diagnostic codes.
pub mod codes {
    // template
    pub const MISSING_KEY: &str = "E_MISSING_KEY";
    pub const WRONG_KIND: &str = "E_WRONG_KIND";
    pub const BAD_VALUE: &str = "E_BAD_VALUE";
    pub const BAD_NAME: &str = "E_BAD_NAME";
    pub const DUP_CATEGORY: &str = "E_DUP_CATEGORY";
    pub const BAD_COLOR: &str = "E_BAD_COLOR";
    pub const COMPOSITE_EMPTY: &str = "E_COMPOSITE_EMPTY";
    pub const CHILDREN_NOT_COMPOSITE: &str = "E_CHILDREN_NOT_COMPOSITE";
    pub const NESTED_COMPOSITE: &str = "E_NESTED_COMPOSITE";
    pub const OPTION_COUNT: &str = "E_OPTION_COUNT";
    pub const FOLLOWUP_KEY: &str = "E_FOLLOWUP_KEY";
    pub const DUP_QUESTION: &str = "E_DUP_QUESTION";
    pub const TREE_DEPTH: &str = "E_TREE_DEPTH";
    pub const ADJUDICATION: &str = "E_ADJUDICATION";
    pub const LOCALE_KEY: &str = "E_LOCALE_KEY";
    pub const NO_CATEGORIES: &str = "E_NO_CATEGORIES";
    pub const UNKNOWN_KEY: &str = "W_UNKNOWN_KEY";

    // spans
    pub const SPAN_RANGE: &str = "E_SPAN_RANGE";
    pub const SPAN_BOUNDARY: &str = "E_SPAN_BOUNDARY";
    pub const SPAN_GRANULARITY: &str = "E_SPAN_GRANULARITY";
    pub const SPAN_OVERLAP: &str = "E_SPAN_OVERLAP";

    // data
    pub const SCHEMA: &str = "E_SCHEMA";
    pub const DUP_ID: &str = "E_DUP_ID";
    pub const BAD_BOUNDS: &str = "E_BAD_BOUNDS";
    pub const FORMAT_VERSION: &str = "E_FORMAT_VERSION";
    pub const TYPOLOGY_MISMATCH: &str = "E_TYPOLOGY_MISMATCH";
    pub const UNKNOWN_INSTANCE: &str = "E_UNKNOWN_INSTANCE";
    pub const DUP_ENTRY_IN_FILE: &str = "E_DUP_INSTANCE_ENTRY";
    pub const UNKNOWN_CATEGORY: &str = "E_UNKNOWN_CATEGORY";
    pub const SPAN_SIDE: &str = "E_SPAN_SIDE";
    pub const SPAN_COUNT: &str = "E_SPAN_COUNT";
    pub const NO_SOURCE: &str = "E_NO_SOURCE";
    pub const COMPOSITE_SPANS: &str = "E_COMPOSITE_SPANS";
    pub const COMPOSITE_CHILD: &str = "E_COMPOSITE_CHILD";
    pub const UNEXPECTED_CHILDREN: &str = "E_UNEXPECTED_CHILDREN";
    pub const UNKNOWN_QUESTION: &str = "E_UNKNOWN_QUESTION";
    pub const DUP_ANSWER: &str = "E_DUP_ANSWER";
    pub const ANSWER_KIND: &str = "E_ANSWER_KIND";
    pub const ANSWER_RANGE: &str = "E_ANSWER_RANGE";
    pub const EMPTY_TEXT: &str = "E_EMPTY_TEXT";
    pub const UNTRIGGERED: &str = "E_UNTRIGGERED";
    pub const MISSING_ANSWER: &str = "E_MISSING_ANSWER";
    pub const NEEDS_ANNOTATIONS: &str = "E_NEEDS_ANNOTATIONS";
    pub const MISSING_BOUNDS: &str = "E_MISSING_BOUNDS";
    pub const UNKNOWN_LOCALE: &str = "E_UNKNOWN_LOCALE";
    pub const YAML_SYNTAX: &str = "E_YAML_SYNTAX";
    pub const JSON_SYNTAX: &str = "E_JSON_SYNTAX";
    pub const EXTERNAL_FORMAT: &str = "E_EXTERNAL_FORMAT";
    pub const CAPABILITY: &str = "E_CAPABILITY";
    pub const MANIFEST_MISMATCH: &str = "E_MANIFEST_MISMATCH";
    pub const BUNDLE_FORMAT: &str = "E_BUNDLE_FORMAT";
    pub const ANSWERS_NOT_ALLOWED: &str = "E_ANSWERS_NOT_ALLOWED";

    // merge
    pub const DUP_ENTRY: &str = "W_DUP_ENTRY";
    pub const CONFLICT: &str = "E_CONFLICT";
    pub const METADATA_CONFLICT: &str = "W_METADATA_CONFLICT";
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
