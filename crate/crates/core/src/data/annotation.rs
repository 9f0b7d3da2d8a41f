// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::check::check_annotation_set;
use super::{json_error, DataError, FORMAT_VERSION};
use crate::canonical::to_canonical_string;
use crate::diagnostic::{has_errors, Diagnostic};
use crate::span::{Side, Span};
use crate::typology::{Boundary, Typology};

use super::instance::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnswerValue {
    /// Selected option index for binary and scale questions.
    Option(usize),
    /// Free text for textbox questions.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Answer {
    pub question: String,
    pub value: AnswerValue,
}

impl Answer {
    pub fn option(question: &str, index: usize) -> Self {
        Self {
            question: question.to_string(),
            value: AnswerValue::Option(index),
        }
    }

    pub fn text(question: &str, text: &str) -> Self {
        Self {
            question: question.to_string(),
            value: AnswerValue::Text(text.to_string()),
        }
    }
}

/// One annotated phenomenon.
///
/// Composite edits carry their selection in `children`; every other edit
/// carries spans directly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Edit {
    pub category: String,
    pub source: Vec<Span>,
    pub target: Vec<Span>,
    pub children: Vec<Edit>,
    pub answers: Vec<Answer>,
}

impl Edit {
    pub fn new(category: &str) -> Self {
        Self {
            category: category.to_string(),
            ..Default::default()
        }
    }

    pub fn with_span(
        mut self,
        side: Side,
        start: usize,
        end: usize,
        granularity: Boundary,
    ) -> Self {
        let span = Span {
            side,
            start,
            end,
            granularity,
        };
        match side {
            Side::Source => self.source.push(span),
            Side::Target => self.target.push(span),
        }
        self
    }

    pub fn with_answer(mut self, answer: Answer) -> Self {
        self.answers.push(answer);
        self
    }

    pub fn with_child(mut self, child: Edit) -> Self {
        self.children.push(child);
        self
    }

    pub fn spans(&self, side: Side) -> &[Span] {
        match side {
            Side::Source => &self.source,
            Side::Target => &self.target,
        }
    }
}

/// Edits one annotator made on one instance. An entry with no edits is an
/// explicit "nothing to annotate" confirmation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceAnnotations {
    pub id: String,
    pub edits: Vec<Edit>,
}

/// One annotator's annotation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    pub typology_name: String,
    pub annotator_id: String,
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub instances: Vec<InstanceAnnotations>,
}

impl AnnotationSet {
    pub fn new(typology_name: &str, annotator_id: &str) -> Self {
        Self {
            typology_name: typology_name.to_string(),
            annotator_id: annotator_id.to_string(),
            metadata: BTreeMap::new(),
            instances: Vec::new(),
        }
    }

    pub fn entry(&self, instance_id: &str) -> Option<&InstanceAnnotations> {
        self.instances.iter().find(|e| e.id == instance_id)
    }

    pub fn edit_count(&self) -> usize {
        self.instances.iter().map(|e| e.edits.len()).sum()
    }
}

// Wire representation. Field order here does not matter: output goes
// through canonical serialization, which sorts keys.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireSet {
    pub format_version: String,
    pub typology_name: String,
    pub annotator_id: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub instances: Vec<WireEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireEntry {
    pub id: String,
    pub edits: Vec<WireEdit>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireEdit {
    pub category: String,
    #[serde(default)]
    pub source: Vec<WireSpan>,
    #[serde(default)]
    pub target: Vec<WireSpan>,
    #[serde(default)]
    pub children: Vec<WireEdit>,
    #[serde(default)]
    pub answers: Vec<WireAnswer>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireSpan {
    pub start: usize,
    pub end: usize,
    pub granularity: Boundary,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireAnswer {
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub option: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl WireSet {
    pub(crate) fn from_model(a: &AnnotationSet) -> Self {
        WireSet {
            format_version: FORMAT_VERSION.to_string(),
            typology_name: a.typology_name.clone(),
            annotator_id: a.annotator_id.clone(),
            metadata: a.metadata.clone(),
            instances: a
                .instances
                .iter()
                .map(|e| WireEntry {
                    id: e.id.clone(),
                    edits: e.edits.iter().map(edit_to_wire).collect(),
                })
                .collect(),
        }
    }

    pub(crate) fn into_model(self) -> Result<AnnotationSet, DataError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DataError::Schema {
                path: "format_version".into(),
                message: format!(
                    "unsupported format_version `{}` (expected {FORMAT_VERSION})",
                    self.format_version
                ),
            });
        }
        let mut instances = Vec::with_capacity(self.instances.len());
        for entry in self.instances {
            let mut edits = Vec::with_capacity(entry.edits.len());
            for (i, e) in entry.edits.into_iter().enumerate() {
                edits.push(edit_from_wire(
                    e,
                    &format!("instances[{}].edits[{i}]", entry.id),
                )?);
            }
            instances.push(InstanceAnnotations {
                id: entry.id,
                edits,
            });
        }
        Ok(AnnotationSet {
            typology_name: self.typology_name,
            annotator_id: self.annotator_id,
            metadata: self.metadata,
            instances,
        })
    }
}

fn edit_to_wire(e: &Edit) -> WireEdit {
    let span = |s: &Span| WireSpan {
        start: s.start,
        end: s.end,
        granularity: s.granularity,
    };
    WireEdit {
        category: e.category.clone(),
        source: e.source.iter().map(span).collect(),
        target: e.target.iter().map(span).collect(),
        children: e.children.iter().map(edit_to_wire).collect(),
        answers: e
            .answers
            .iter()
            .map(|a| match &a.value {
                AnswerValue::Option(i) => WireAnswer {
                    question: a.question.clone(),
                    option: Some(*i),
                    text: None,
                },
                AnswerValue::Text(t) => WireAnswer {
                    question: a.question.clone(),
                    option: None,
                    text: Some(t.clone()),
                },
            })
            .collect(),
    }
}

fn edit_from_wire(e: WireEdit, path: &str) -> Result<Edit, DataError> {
    let spans = |side: Side, v: Vec<WireSpan>| -> Vec<Span> {
        v.into_iter()
            .map(|w| Span {
                side,
                start: w.start,
                end: w.end,
                granularity: w.granularity,
            })
            .collect()
    };
    let mut answers = Vec::with_capacity(e.answers.len());
    for (i, a) in e.answers.into_iter().enumerate() {
        let value = match (a.option, a.text) {
            (Some(o), None) => AnswerValue::Option(o),
            (None, Some(t)) => AnswerValue::Text(t),
            _ => {
                return Err(DataError::Schema {
                    path: format!("{path}.answers[{i}]"),
                    message: "an answer carries exactly one of `option` or `text`".into(),
                })
            }
        };
        answers.push(Answer {
            question: a.question,
            value,
        });
    }
    let mut children = Vec::with_capacity(e.children.len());
    for (i, c) in e.children.into_iter().enumerate() {
        children.push(edit_from_wire(c, &format!("{path}.children[{i}]"))?);
    }
    Ok(Edit {
        category: e.category,
        source: spans(Side::Source, e.source),
        target: spans(Side::Target, e.target),
        children,
        answers,
    })
}

/// Parse an annotation file without validating it against a typology.
pub fn parse_annotation_document(json_text: &str) -> Result<AnnotationSet, DataError> {
    let de = &mut serde_json::Deserializer::from_str(json_text);
    let wire: WireSet = serde_path_to_error::deserialize(de).map_err(json_error)?;
    wire.into_model()
}

/// Parse an annotation file and validate every edit against the typology
/// and the instance texts.
pub fn parse_annotations(
    json_text: &str,
    t: &Typology,
    instances: &[Instance],
) -> Result<AnnotationSet, DataError> {
    let set = parse_annotation_document(json_text)?;
    let diags = check_annotation_set(&set, t, Some(instances));
    if has_errors(&diags) {
        return Err(DataError::Invalid(
            diags.into_iter().filter(Diagnostic::is_error).collect(),
        ));
    }
    Ok(set)
}

/// Canonical serialization: sorted keys, no whitespace, UTF-8.
pub fn serialize_annotations(a: &AnnotationSet) -> String {
    to_canonical_string(&WireSet::from_model(a))
}

/// An edit in its unified-format JSON shape.
pub fn edit_to_json(e: &Edit) -> serde_json::Value {
    serde_json::to_value(edit_to_wire(e)).expect("edits always serialize")
}
