// SPDX-License-Identifier: Apache-2.0

use std::borrow::Cow;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{json_error, DataError};
use crate::span::{char_len, compute_boundaries, BoundarySet, Side};
use crate::typology::{Boundary, TemplateConfig};

/// One source/target/context record from an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_before: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_after: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_bounds_source: Option<BoundarySet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_bounds_target: Option<BoundarySet>,
}

impl Instance {
    pub fn new(id: &str, source: Option<&str>, target: &str) -> Self {
        Self {
            id: id.to_string(),
            source: source.map(str::to_string),
            target: target.to_string(),
            context: None,
            context_before: None,
            context_after: None,
            token_bounds_source: None,
            token_bounds_target: None,
        }
    }

    pub fn text(&self, side: Side) -> Option<&str> {
        match side {
            Side::Source => self.source.as_deref(),
            Side::Target => Some(&self.target),
        }
    }

    pub fn token_bounds(&self, side: Side) -> Option<&BoundarySet> {
        match side {
            Side::Source => self.token_bounds_source.as_ref(),
            Side::Target => self.token_bounds_target.as_ref(),
        }
    }

    /// Legal boundaries for one side, computed for char/whitespace mode and
    /// taken from the record for subword mode. `None` when the side has no
    /// text or subword arrays are missing.
    pub fn bounds(&self, side: Side, mode: Boundary) -> Option<Cow<'_, BoundarySet>> {
        let text = self.text(side)?;
        match mode {
            Boundary::Subword => self.token_bounds(side).map(Cow::Borrowed),
            _ => Some(Cow::Owned(
                compute_boundaries(text, mode).expect("char/whitespace always compute"),
            )),
        }
    }
}

/// Parse an instance file: a JSON array of records.
///
/// Token boundary arrays, when present, are checked for order and range
/// whatever the boundary mode. Whether they are present for every
/// selectable side is checked at compile time, where the typology's sides
/// are known.
pub fn parse_instances(
    json_text: &str,
    _config: &TemplateConfig,
) -> Result<Vec<Instance>, DataError> {
    let de = &mut serde_json::Deserializer::from_str(json_text);
    let records: Vec<Instance> = serde_path_to_error::deserialize(de).map_err(json_error)?;
    check_instances(&records)?;
    Ok(records)
}

pub(crate) fn check_instances(records: &[Instance]) -> Result<(), DataError> {
    let mut seen = HashSet::new();
    for (i, rec) in records.iter().enumerate() {
        if rec.id.is_empty() {
            return Err(DataError::Schema {
                path: format!("[{i}].id"),
                message: "id must be non-empty".into(),
            });
        }
        if rec.target.is_empty() {
            return Err(DataError::Schema {
                path: format!("[{i}].target"),
                message: "target must be non-empty".into(),
            });
        }
        if !seen.insert(rec.id.as_str()) {
            return Err(DataError::DuplicateId(rec.id.clone()));
        }
        for side in [Side::Source, Side::Target] {
            let Some(bounds) = rec.token_bounds(side) else {
                continue;
            };
            let field = format!("[{i}].token_bounds_{side}");
            let Some(text) = rec.text(side) else {
                return Err(DataError::Schema {
                    path: field,
                    message: format!("token bounds given but no {side} text"),
                });
            };
            bounds
                .check(char_len(text))
                .map_err(|e| DataError::Schema {
                    path: field,
                    message: e.to_string(),
                })?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TemplateConfig {
        TemplateConfig::default()
    }

    #[test]
    fn empty_array() {
        assert!(parse_instances("[]", &cfg()).unwrap().is_empty());
    }

    #[test]
    fn optional_fields_absent() {
        let v = parse_instances(r#"[{"id":"x1","source":"A b.","target":"A."}]"#, &cfg()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].source.as_deref(), Some("A b."));
        assert!(
            v[0].context.is_none()
                && v[0].context_before.is_none()
                && v[0].token_bounds_target.is_none()
        );
    }

    #[test]
    fn duplicate_ids() {
        let err = parse_instances(
            r#"[{"id":"x1","target":"a"},{"id":"x1","target":"b"}]"#,
            &cfg(),
        )
        .unwrap_err();
        assert!(matches!(err, DataError::DuplicateId(id) if id == "x1"));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_instances(r#"[{"id":"x1","target":"a"},{"id":"x2"}]"#, &cfg()).unwrap_err();
        match err {
            DataError::Schema { path, .. } => assert_eq!(path, "[1]"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_instances(r#"[{"id":"x1","target":"a","colour":1}]"#, &cfg()).unwrap_err();
        assert!(matches!(err, DataError::Schema { .. }));
    }

    #[test]
    fn token_bounds_are_checked() {
        let ok =
            r#"[{"id":"x","target":"abcd","token_bounds_target":{"starts":[0,2],"ends":[2,4]}}]"#;
        assert!(parse_instances(ok, &cfg()).is_ok());
        let bad =
            r#"[{"id":"x","target":"abcd","token_bounds_target":{"starts":[2,0],"ends":[2,4]}}]"#;
        match parse_instances(bad, &cfg()).unwrap_err() {
            DataError::Schema { path, .. } => assert_eq!(path, "[0].token_bounds_target"),
            other => panic!("unexpected {other:?}"),
        }
        let past_end =
            r#"[{"id":"x","target":"ab","token_bounds_target":{"starts":[0],"ends":[5]}}]"#;
        assert!(parse_instances(past_end, &cfg()).is_err());
    }
}
