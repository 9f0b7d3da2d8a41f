// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::annotation::{AnnotationSet, Edit, InstanceAnnotations, WireSet};
use super::check::check_annotation_set;
use super::instance::Instance;
use super::{json_error, DataError, FORMAT_VERSION};
use crate::canonical::to_canonical_string;
use crate::diagnostic::{codes, has_errors, Diagnostic};
use crate::typology::Typology;

/// Annotations from several annotators, one set per annotator, ordered by
/// annotator id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationCollection {
    pub typology_name: String,
    pub sets: Vec<AnnotationSet>,
}

impl AnnotationCollection {
    pub fn annotator(&self, id: &str) -> Option<&AnnotationSet> {
        self.sets.iter().find(|s| s.annotator_id == id)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCollection {
    format_version: String,
    typology_name: String,
    annotators: Vec<WireSet>,
}

pub fn serialize_collection(c: &AnnotationCollection) -> String {
    to_canonical_string(&WireCollection {
        format_version: FORMAT_VERSION.to_string(),
        typology_name: c.typology_name.clone(),
        annotators: c.sets.iter().map(WireSet::from_model).collect(),
    })
}

/// Parse either a single annotation file or a merged collection into its
/// per-annotator sets.
pub fn parse_annotation_sets(json_text: &str) -> Result<Vec<AnnotationSet>, DataError> {
    let probe: serde_json::Value =
        serde_json::from_str(json_text).map_err(|e| DataError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    if probe.get("annotators").is_some() {
        let de = &mut serde_json::Deserializer::from_str(json_text);
        let wire: WireCollection = serde_path_to_error::deserialize(de).map_err(json_error)?;
        if wire.format_version != FORMAT_VERSION {
            return Err(DataError::Schema {
                path: "format_version".into(),
                message: format!("unsupported format_version `{}`", wire.format_version),
            });
        }
        wire.annotators
            .into_iter()
            .map(WireSet::into_model)
            .collect()
    } else {
        super::annotation::parse_annotation_document(json_text).map(|s| vec![s])
    }
}

/// Merge annotation files into one collection.
///
/// Entries are keyed by (annotator, instance). Identical repeats collapse to
/// one entry with a `W_DUP_ENTRY` warning; differing repeats are dropped
/// with an `E_CONFLICT` error. The outcome does not depend on file order.
///
/// Entries follow instance-file order when `instances` is given, and
/// instance id order otherwise.
pub fn merge_annotations(
    files: &[&str],
    t: &Typology,
    instances: Option<&[Instance]>,
) -> Result<(AnnotationCollection, Vec<Diagnostic>), DataError> {
    let mut sets = Vec::new();
    for (index, text) in files.iter().enumerate() {
        let parsed = parse_annotation_sets(text).map_err(|e| DataError::InFile {
            index,
            source: Box::new(e),
        })?;
        for set in parsed {
            let diags = check_annotation_set(&set, t, instances);
            if has_errors(&diags) {
                return Err(DataError::InFile {
                    index,
                    source: Box::new(DataError::Invalid(
                        diags.into_iter().filter(Diagnostic::is_error).collect(),
                    )),
                });
            }
            sets.push(set);
        }
    }
    Ok(merge_sets(sets, t, instances))
}

/// Merge already-validated sets. See [`merge_annotations`].
pub fn merge_sets(
    sets: Vec<AnnotationSet>,
    t: &Typology,
    instances: Option<&[Instance]>,
) -> (AnnotationCollection, Vec<Diagnostic>) {
    let order: HashMap<&str, usize> = instances
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(i, x)| (x.id.as_str(), i))
        .collect();
    let mut diags = Vec::new();

    // annotator -> instance -> every edit list seen for that key
    let mut entries: BTreeMap<String, BTreeMap<String, Vec<Vec<Edit>>>> = BTreeMap::new();
    let mut metadata: BTreeMap<String, BTreeMap<String, Vec<serde_json::Value>>> = BTreeMap::new();
    for set in sets {
        let per = entries.entry(set.annotator_id.clone()).or_default();
        for e in set.instances {
            per.entry(e.id).or_default().push(e.edits);
        }
        let meta = metadata.entry(set.annotator_id).or_default();
        for (k, v) in set.metadata {
            meta.entry(k).or_default().push(v);
        }
    }

    let mut out = Vec::new();
    for (annotator, per) in entries {
        let mut kept: Vec<InstanceAnnotations> = Vec::new();
        for (instance_id, versions) in per {
            let key = format!("{annotator}/{instance_id}");
            if versions.iter().all(|v| v == &versions[0]) {
                if versions.len() > 1 {
                    diags.push(Diagnostic::warning(
                        codes::DUP_ENTRY,
                        key,
                        format!("{} identical copies collapsed to one", versions.len()),
                    ));
                }
                kept.push(InstanceAnnotations {
                    id: instance_id,
                    edits: versions.into_iter().next().unwrap(),
                });
            } else {
                diags.push(Diagnostic::error(
                    codes::CONFLICT,
                    key,
                    format!("{} differing versions; entry excluded", versions.len()),
                ));
            }
        }
        kept.sort_by_key(|e| order.get(e.id.as_str()).copied().unwrap_or(usize::MAX));

        let mut meta = BTreeMap::new();
        for (k, mut values) in metadata.remove(&annotator).unwrap_or_default() {
            values.sort_by_key(|v| v.to_string());
            values.dedup();
            if values.len() > 1 {
                diags.push(Diagnostic::warning(
                    codes::METADATA_CONFLICT,
                    format!("{annotator}.metadata.{k}"),
                    "differing metadata values; keeping the first in canonical order",
                ));
            }
            meta.insert(k, values.swap_remove(0));
        }

        let set = AnnotationSet {
            typology_name: t.name.clone(),
            annotator_id: annotator,
            metadata: meta,
            instances: kept,
        };
        diags.extend(
            check_annotation_set(&set, t, instances)
                .into_iter()
                .filter(Diagnostic::is_error),
        );
        out.push(set);
    }
    (
        AnnotationCollection {
            typology_name: t.name.clone(),
            sets: out,
        },
        diags,
    )
}
