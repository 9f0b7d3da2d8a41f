// SPDX-License-Identifier: Apache-2.0

//! `offset-label`: a flat JSON array of span records.
//!
//! ```json
//! [
//!   {"header": {"annotator_id": "a1", "metadata": {}, "instances": ["x1", "x2"]}},
//!   {"instance_id": "x1", "side": "target", "start": 4, "end": 9, "label": "grammar", "severity": 2}
//! ]
//! ```
//!
//! Each record is one single-span edit. `severity` is the option index
//! answered for the category's `severity` question. The optional leading
//! `header` element carries the annotator, metadata and the instance list
//! (which preserves instance order and entries without edits); it is
//! omitted when none of that information is present. Records may carry a
//! `group` id; records sharing one would form a multi-span edit, which this
//! format does not support.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{
    check_capabilities, validate_converted, Capability, CapabilityViolation, ConvertError,
    Converter, ConverterDescriptor,
};
use crate::canonical::to_canonical_string;
use crate::data::{AnnotationSet, Answer, AnswerValue, Edit, InstanceAnnotations};
use crate::span::{Side, Span};
use crate::typology::{Selection, Typology};

pub const SEVERITY_QUESTION: &str = "severity";

#[derive(Debug, Default, Clone, Copy)]
pub struct OffsetLabel;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    instance_id: String,
    side: Side,
    start: usize,
    end: usize,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    severity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    #[serde(default)]
    annotator_id: String,
    #[serde(default)]
    metadata: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    instances: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderElement {
    header: Header,
}

fn bad(msg: impl Into<String>) -> ConvertError {
    ConvertError::ExternalFormat(msg.into())
}

impl Converter for OffsetLabel {
    fn descriptor(&self) -> ConverterDescriptor {
        ConverterDescriptor {
            format_name: "offset-label".into(),
            capabilities: [Capability::SourceSide, Capability::Questions]
                .into_iter()
                .collect(),
            lossless: true,
        }
    }

    fn to_unified(&self, external: &str, t: &Typology) -> Result<AnnotationSet, ConvertError> {
        let items: Vec<serde_json::Value> = serde_json::from_str(external)
            .map_err(|e| bad(format!("expected a JSON array of records: {e}")))?;

        let mut header = None;
        let mut records = Vec::with_capacity(items.len());
        for (i, item) in items.into_iter().enumerate() {
            if item.get("header").is_some() {
                if i != 0 {
                    return Err(bad(format!(
                        "element {i}: the header must be the first element"
                    )));
                }
                let h: HeaderElement =
                    serde_json::from_value(item).map_err(|e| bad(format!("element {i}: {e}")))?;
                header = Some(h.header);
            } else {
                let r: Record =
                    serde_json::from_value(item).map_err(|e| bad(format!("element {i}: {e}")))?;
                records.push(r);
            }
        }
        let header_given = header.is_some();
        let header = header.unwrap_or_default();

        let mut violations = Vec::new();
        let mut group_sizes: HashMap<(&str, &str), usize> = HashMap::new();
        for r in &records {
            if let Some(g) = &r.group {
                *group_sizes
                    .entry((r.instance_id.as_str(), g.as_str()))
                    .or_default() += 1;
            }
        }
        for r in &records {
            if let Some(g) = &r.group {
                if group_sizes[&(r.instance_id.as_str(), g.as_str())] > 1 {
                    violations.push(CapabilityViolation {
                        feature: Capability::MultiSpan,
                        instance_id: r.instance_id.clone(),
                    });
                }
            }
            if t.category(&r.label)
                .is_some_and(|c| c.selection == Selection::Composite)
            {
                violations.push(CapabilityViolation {
                    feature: Capability::Composite,
                    instance_id: r.instance_id.clone(),
                });
            }
        }
        if !violations.is_empty() {
            violations.dedup_by(|a, b| a.feature == b.feature && a.instance_id == b.instance_id);
            return Err(ConvertError::Capability(violations));
        }

        let mut entries: Vec<InstanceAnnotations> = header
            .instances
            .iter()
            .map(|id| InstanceAnnotations {
                id: id.clone(),
                edits: Vec::new(),
            })
            .collect();
        let mut slot: HashMap<String, usize> = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        if slot.len() != entries.len() {
            return Err(bad("header lists an instance more than once"));
        }
        for r in records {
            let idx = match slot.get(&r.instance_id) {
                Some(&i) => i,
                None if header_given => {
                    return Err(bad(format!(
                        "record for `{}` which the header does not list",
                        r.instance_id
                    )))
                }
                None => {
                    entries.push(InstanceAnnotations {
                        id: r.instance_id.clone(),
                        edits: Vec::new(),
                    });
                    slot.insert(r.instance_id.clone(), entries.len() - 1);
                    entries.len() - 1
                }
            };
            let span = Span {
                side: r.side,
                start: r.start,
                end: r.end,
                granularity: t.config.boundary,
            };
            let mut edit = Edit::new(&r.label);
            match r.side {
                Side::Source => edit.source.push(span),
                Side::Target => edit.target.push(span),
            }
            if let Some(sev) = r.severity {
                edit.answers.push(Answer::option(SEVERITY_QUESTION, sev));
            }
            entries[idx].edits.push(edit);
        }

        let set = AnnotationSet {
            typology_name: t.name.clone(),
            annotator_id: header.annotator_id,
            metadata: header.metadata,
            instances: entries,
        };
        validate_converted(set, t)
    }

    fn from_unified(&self, a: &AnnotationSet) -> Result<String, ConvertError> {
        check_capabilities(&self.descriptor(), a)?;
        let mut bad_questions = Vec::new();
        for entry in &a.instances {
            for e in &entry.edits {
                let ok = match e.answers.as_slice() {
                    [] => true,
                    [one] => {
                        one.question == SEVERITY_QUESTION
                            && matches!(one.value, AnswerValue::Option(_))
                    }
                    _ => false,
                };
                if !ok
                    && !bad_questions
                        .iter()
                        .any(|v: &CapabilityViolation| v.instance_id == entry.id)
                {
                    bad_questions.push(CapabilityViolation {
                        feature: Capability::Questions,
                        instance_id: entry.id.clone(),
                    });
                }
            }
        }
        if !bad_questions.is_empty() {
            return Err(ConvertError::Capability(bad_questions));
        }

        let mut out: Vec<serde_json::Value> = Vec::new();
        let needs_header = !a.annotator_id.is_empty()
            || !a.metadata.is_empty()
            || a.instances.iter().any(|e| e.edits.is_empty());
        if needs_header {
            let h = HeaderElement {
                header: Header {
                    annotator_id: a.annotator_id.clone(),
                    metadata: a.metadata.clone(),
                    instances: a.instances.iter().map(|e| e.id.clone()).collect(),
                },
            };
            out.push(serde_json::to_value(h).expect("header serializes"));
        }
        for entry in &a.instances {
            for e in &entry.edits {
                let span = e.source.first().or(e.target.first()).ok_or_else(|| {
                    ConvertError::Capability(vec![CapabilityViolation {
                        feature: Capability::Composite,
                        instance_id: entry.id.clone(),
                    }])
                })?;
                let severity = e.answers.first().and_then(|a| match a.value {
                    AnswerValue::Option(i) => Some(i),
                    AnswerValue::Text(_) => None,
                });
                let rec = Record {
                    instance_id: entry.id.clone(),
                    side: span.side,
                    start: span.start,
                    end: span.end,
                    label: e.category.clone(),
                    severity,
                    group: None,
                };
                out.push(serde_json::to_value(rec).expect("record serializes"));
            }
        }
        Ok(to_canonical_string(&out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typology::{Boundary, EditCategory, QuestionKind, QuestionNode, SideRule};

    fn typology() -> Typology {
        let sev = QuestionNode::new(
            SEVERITY_QUESTION,
            QuestionKind::Scale3,
            "Severity?",
            &["minor", "major", "critical"],
        );
        Typology::new(
            "ol",
            vec![
                EditCategory::new(
                    "grammar",
                    "Grammar",
                    "#aa0000",
                    SideRule::Target,
                    Selection::SingleSpan,
                ),
                EditCategory::new(
                    "omission",
                    "Omission",
                    "#00aa00",
                    SideRule::Source,
                    Selection::SingleSpan,
                )
                .with_question(sev),
                EditCategory::new(
                    "structure",
                    "Structure",
                    "#0000aa",
                    SideRule::Both,
                    Selection::Composite,
                )
                .with_child(EditCategory::new(
                    "reorder",
                    "Reorder",
                    "#0000bb",
                    SideRule::Target,
                    Selection::SingleSpan,
                )),
            ],
        )
    }

    #[test]
    fn empty_document() {
        let set = OffsetLabel.to_unified("[]", &typology()).unwrap();
        assert!(set.instances.is_empty());
        assert_eq!(OffsetLabel.from_unified(&set).unwrap(), "[]");
    }

    #[test]
    fn single_record_becomes_single_span_edit() {
        let doc = r#"[{"end":9,"instance_id":"x1","label":"grammar","side":"target","start":4}]"#;
        let set = OffsetLabel.to_unified(doc, &typology()).unwrap();
        assert_eq!(set.instances.len(), 1);
        let e = &set.instances[0].edits[0];
        assert_eq!(e.category, "grammar");
        assert!(e.source.is_empty());
        assert_eq!(
            e.target,
            vec![Span {
                side: Side::Target,
                start: 4,
                end: 9,
                granularity: Boundary::Whitespace
            }]
        );
        assert_eq!(OffsetLabel.from_unified(&set).unwrap(), doc);
    }

    #[test]
    fn grouped_records_need_multi_span() {
        let doc = r#"[{"instance_id":"x1","side":"target","start":0,"end":3,"label":"grammar","group":"g"},
                      {"instance_id":"x1","side":"target","start":2,"end":5,"label":"grammar","group":"g"}]"#;
        let err = OffsetLabel.to_unified(doc, &typology()).unwrap_err();
        assert_eq!(
            err.features(),
            [Capability::MultiSpan].into_iter().collect()
        );
    }

    #[test]
    fn composite_edit_is_rejected_on_export() {
        let mut set = AnnotationSet::new("ol", "a1");
        set.instances.push(InstanceAnnotations {
            id: "x9".into(),
            edits: vec![
                Edit::new("structure").with_child(Edit::new("reorder").with_span(
                    Side::Target,
                    0,
                    3,
                    Boundary::Whitespace,
                )),
            ],
        });
        match OffsetLabel.from_unified(&set).unwrap_err() {
            ConvertError::Capability(v) => {
                assert!(v
                    .iter()
                    .any(|x| x.feature == Capability::Composite && x.instance_id == "x9"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn severity_round_trips_and_header_keeps_empty_entries() {
        let mut set = AnnotationSet::new("ol", "ann-7");
        set.metadata.insert("batch".into(), serde_json::json!(3));
        set.instances.push(InstanceAnnotations {
            id: "x2".into(),
            edits: vec![],
        });
        set.instances.push(InstanceAnnotations {
            id: "x1".into(),
            edits: vec![Edit::new("omission")
                .with_span(Side::Source, 0, 3, Boundary::Whitespace)
                .with_answer(Answer::option(SEVERITY_QUESTION, 2))],
        });
        let text = OffsetLabel.from_unified(&set).unwrap();
        assert_eq!(OffsetLabel.to_unified(&text, &typology()).unwrap(), set);
    }

    #[test]
    fn unknown_label_fails_validation() {
        let doc =
            r#"[{"instance_id":"x1","side":"target","start":0,"end":2,"label":"hallucination"}]"#;
        assert!(matches!(
            OffsetLabel.to_unified(doc, &typology()),
            Err(ConvertError::Invalid(_))
        ));
    }

    #[test]
    fn unknown_fields_are_format_errors() {
        let doc = r#"[{"instance_id":"x1","side":"target","start":0,"end":2,"label":"grammar","colour":"red"}]"#;
        assert!(matches!(
            OffsetLabel.to_unified(doc, &typology()),
            Err(ConvertError::ExternalFormat(_))
        ));
    }
}
