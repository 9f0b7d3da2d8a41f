// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use thresh_core::data::{parse_annotations, parse_instances, AnnotationSet, Instance};
use thresh_core::typology::{parse_template, Typology};
use thresh_core::Diagnostic;

use crate::store::LogRecord;

/// Template, instances and any preloaded annotations, parsed.
#[derive(Debug)]
pub struct Content {
    pub typology: Typology,
    pub instances: Vec<Instance>,
    pub initial: Vec<AnnotationSet>,
}

impl Content {
    /// Parse and validate session sources. Used both when a session is
    /// created and when its log is replayed.
    pub fn parse(
        template: &str,
        data: &str,
        annotations: &[String],
    ) -> Result<Self, Vec<Diagnostic>> {
        let typology = parse_template(template)
            .map_err(|e| e.diagnostics())?
            .typology;
        let instances = parse_instances(data, &typology.config).map_err(|e| e.diagnostics())?;
        let initial = annotations
            .iter()
            .map(|a| parse_annotations(a, &typology, &instances))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.diagnostics())?;
        Ok(Self {
            typology,
            instances,
            initial,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Submission {
    pub set: AnnotationSet,
    pub canonical: String,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub code: String,
    pub issued_at: String,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub template: String,
    pub data: String,
    pub initial_sources: Vec<String>,
    /// Parsed content, or the diagnostics explaining why the stored
    /// sources no longer parse.
    pub content: Result<Content, Vec<Diagnostic>>,
    /// Latest submission per annotator.
    pub submissions: BTreeMap<String, Submission>,
    pub submission_count: usize,
    pub completions: BTreeMap<String, Completion>,
    pub closed: bool,
}

impl Session {
    pub fn from_log(id: &str, records: Vec<LogRecord>) -> Result<Self, String> {
        let mut it = records.into_iter();
        let Some(LogRecord::SessionCreated {
            template,
            data,
            annotations,
        }) = it.next()
        else {
            return Err(format!(
                "log of session `{id}` does not start with its creation record"
            ));
        };
        let content = Content::parse(&template, &data, &annotations);
        let mut s = Session {
            id: id.to_string(),
            template,
            data,
            initial_sources: annotations,
            content,
            submissions: BTreeMap::new(),
            submission_count: 0,
            completions: BTreeMap::new(),
            closed: false,
        };
        for r in it {
            s.apply(r);
        }
        Ok(s)
    }

    pub fn apply(&mut self, record: LogRecord) {
        match record {
            LogRecord::SessionCreated { .. } => {
                tracing::warn!(session = %self.id, "ignoring repeated creation record");
            }
            LogRecord::Submission {
                annotator_id,
                annotations,
                hash,
            } => {
                let Ok(content) = &self.content else { return };
                match parse_annotations(&annotations, &content.typology, &content.instances) {
                    Ok(set) => {
                        self.submission_count += 1;
                        self.submissions.insert(
                            annotator_id,
                            Submission {
                                set,
                                canonical: annotations,
                                hash,
                            },
                        );
                    }
                    Err(e) => {
                        tracing::warn!(session = %self.id, "skipping unparsable logged submission: {e}")
                    }
                }
            }
            LogRecord::Completion {
                annotator_id,
                code,
                issued_at,
            } => {
                self.completions
                    .entry(annotator_id)
                    .or_insert(Completion { code, issued_at });
            }
            LogRecord::Closed => self.closed = true,
        }
    }

    /// Instance ids the annotator has neither annotated nor confirmed as
    /// needing no edits, in instance order.
    pub fn unannotated(&self, annotator: &str) -> Vec<String> {
        let (Ok(content), Some(sub)) = (&self.content, self.submissions.get(annotator)) else {
            return Vec::new();
        };
        content
            .instances
            .iter()
            .filter(|i| sub.set.entry(&i.id).is_none())
            .map(|i| i.id.clone())
            .collect()
    }
}
