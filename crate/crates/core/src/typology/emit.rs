// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_yaml::{Mapping, Value};

use super::model::*;
use super::validate::validate_typology;
use super::TemplateError;
use crate::diagnostic::{has_errors, Diagnostic};

/// Structured description of a template, the input to [`create_template`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub name: String,
    #[serde(default)]
    pub config: TemplateConfig,
    pub categories: Vec<EditCategory>,
    #[serde(default)]
    pub localization: BTreeMap<String, LocalePack>,
}

impl TemplateSpec {
    pub fn into_typology(self) -> Typology {
        Typology {
            name: self.name,
            config: self.config,
            categories: self.categories,
            localization: self.localization,
        }
    }
}

impl From<Typology> for TemplateSpec {
    fn from(t: Typology) -> Self {
        Self {
            name: t.name,
            config: t.config,
            categories: t.categories,
            localization: t.localization,
        }
    }
}

/// Generate template YAML from a structured spec.
///
/// Output is deterministic: keys appear in a fixed order, optional keys are
/// omitted when unset, nesting is indented by two spaces.
pub fn create_template(spec: &TemplateSpec) -> Result<String, TemplateError> {
    let t = spec.clone().into_typology();
    let diags: Vec<Diagnostic> = validate_typology(&t);
    if has_errors(&diags) {
        return Err(TemplateError::Schema(
            diags.into_iter().filter(Diagnostic::is_error).collect(),
        ));
    }
    Ok(emit_yaml(&t))
}

/// Render a typology as template YAML without validating it.
pub fn emit_yaml(t: &Typology) -> String {
    let mut root = Mapping::new();
    root.insert(s("name"), s(&t.name));
    root.insert(s("config"), Value::Mapping(config(&t.config)));
    root.insert(
        s("edits"),
        Value::Sequence(t.categories.iter().map(category).collect()),
    );
    if !t.localization.is_empty() {
        let mut loc = Mapping::new();
        for (code, pack) in &t.localization {
            let strings: Mapping = pack.strings.iter().map(|(k, v)| (s(k), s(v))).collect();
            loc.insert(s(code), Value::Mapping(strings));
        }
        root.insert(s("localization"), Value::Mapping(loc));
    }
    serde_yaml::to_string(&Value::Mapping(root)).expect("YAML values always serialize")
}

fn s(v: &str) -> Value {
    Value::String(v.to_string())
}

fn config(c: &TemplateConfig) -> Mapping {
    let mut m = Mapping::new();
    m.insert(s("boundary"), s(c.boundary.as_str()));
    m.insert(s("mode"), s(c.mode.as_str()));
    m.insert(s("adjudication"), Value::Number(c.adjudication.into()));
    m.insert(s("language"), s(&c.language));
    if let Some(v) = &c.instructions {
        m.insert(s("instructions"), s(v));
    }
    m.insert(
        s("instructions_display"),
        s(c.instructions_display.as_str()),
    );
    m.insert(s("display"), s(c.display.as_str()));
    for (key, val) in [
        ("citation", &c.citation),
        ("paper_link", &c.paper_link),
        ("demo_data_link", &c.demo_data_link),
    ] {
        if let Some(v) = val {
            m.insert(s(key), s(v));
        }
    }
    m
}

fn category(c: &EditCategory) -> Value {
    let mut m = Mapping::new();
    m.insert(s("name"), s(&c.name));
    m.insert(s("label"), s(&c.label));
    m.insert(s("color"), s(&c.color));
    m.insert(s("side"), s(c.side.as_str()));
    m.insert(s("selection"), s(c.selection.as_str()));
    if !c.children.is_empty() {
        m.insert(
            s("children"),
            Value::Sequence(c.children.iter().map(category).collect()),
        );
    }
    if !c.questions.is_empty() {
        m.insert(
            s("questions"),
            Value::Sequence(c.questions.iter().map(question).collect()),
        );
    }
    Value::Mapping(m)
}

fn question(q: &QuestionNode) -> Value {
    let mut m = Mapping::new();
    m.insert(s("id"), s(&q.id));
    m.insert(s("kind"), s(q.kind.as_str()));
    m.insert(s("prompt"), s(&q.prompt));
    if !q.options.is_empty() {
        m.insert(
            s("options"),
            Value::Sequence(q.options.iter().map(|o| s(o)).collect()),
        );
    }
    if q.optional {
        m.insert(s("optional"), Value::Bool(true));
    }
    if !q.followups.is_empty() {
        let mut f = Mapping::new();
        for (idx, list) in &q.followups.by_option {
            f.insert(
                Value::Number((*idx as u64).into()),
                Value::Sequence(list.iter().map(question).collect()),
            );
        }
        if !q.followups.any.is_empty() {
            f.insert(
                s("any"),
                Value::Sequence(q.followups.any.iter().map(question).collect()),
            );
        }
        m.insert(s("followups"), Value::Mapping(f));
    }
    Value::Mapping(m)
}
