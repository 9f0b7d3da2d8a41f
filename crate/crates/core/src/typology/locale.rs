// SPDX-License-Identifier: Apache-2.0

//! Interface strings: built-in packs plus per-template overrides.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use super::model::Typology;
use super::TemplateError;

const BUILTIN: &[(&str, &str)] = &[
    ("en", include_str!("../../resources/locales/en.yaml")),
    ("es", include_str!("../../resources/locales/es.yaml")),
];

fn packs() -> &'static BTreeMap<&'static str, BTreeMap<String, String>> {
    static PACKS: OnceLock<BTreeMap<&'static str, BTreeMap<String, String>>> = OnceLock::new();
    PACKS.get_or_init(|| {
        BUILTIN
            .iter()
            .map(|(code, text)| {
                let strings: BTreeMap<String, String> = serde_yaml::from_str(text)
                    .unwrap_or_else(|e| panic!("bundled locale pack `{code}` is malformed: {e}"));
                (*code, strings)
            })
            .collect()
    })
}

pub fn builtin_locales() -> Vec<&'static str> {
    packs().keys().copied().collect()
}

pub fn is_builtin(code: &str) -> bool {
    packs().contains_key(code)
}

pub fn english_keys() -> BTreeSet<&'static str> {
    packs()["en"].keys().map(String::as_str).collect()
}

/// Fully resolved interface strings for one locale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedStrings {
    pub locale: String,
    /// Every built-in interface key, always present.
    pub ui: BTreeMap<String, String>,
    /// Template label overrides for this locale (`edit.<name>.label`, ...).
    pub labels: BTreeMap<String, String>,
}

/// Resolve interface strings with precedence template override > built-in
/// pack for `locale` > built-in English.
pub fn resolve_locale(t: &Typology, locale: &str) -> Result<ResolvedStrings, TemplateError> {
    let overrides = t.localization.get(locale);
    let pack = packs().get(locale);
    if overrides.is_none() && pack.is_none() {
        return Err(TemplateError::UnknownLocale(locale.to_string()));
    }

    let english = &packs()["en"];
    let mut ui = english.clone();
    if let Some(pack) = pack {
        for (k, v) in pack {
            if let Some(slot) = ui.get_mut(k) {
                *slot = v.clone();
            }
        }
    }
    let mut labels = BTreeMap::new();
    if let Some(over) = overrides {
        for (k, v) in &over.strings {
            match ui.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => {
                    labels.insert(k.clone(), v.clone());
                }
            }
        }
    }
    Ok(ResolvedStrings {
        locale: locale.to_string(),
        ui,
        labels,
    })
}

/// Copy of `t` with category labels, prompts and option labels replaced by
/// the locale's template overrides.
pub fn localize_labels(t: &Typology, strings: &ResolvedStrings) -> Typology {
    use super::model::{EditCategory, QuestionNode};

    fn question(cat: &str, q: &mut QuestionNode, labels: &BTreeMap<String, String>) {
        if let Some(p) = labels.get(&format!("question.{cat}.{}.prompt", q.id)) {
            q.prompt = p.clone();
        }
        for (i, opt) in q.options.iter_mut().enumerate() {
            if let Some(o) = labels.get(&format!("question.{cat}.{}.option.{i}", q.id)) {
                *opt = o.clone();
            }
        }
        for list in q.followups.by_option.values_mut() {
            for child in list {
                question(cat, child, labels);
            }
        }
        for child in &mut q.followups.any {
            question(cat, child, labels);
        }
    }

    fn category(c: &mut EditCategory, labels: &BTreeMap<String, String>) {
        if let Some(l) = labels.get(&format!("edit.{}.label", c.name)) {
            c.label = l.clone();
        }
        let name = c.name.clone();
        for q in &mut c.questions {
            question(&name, q, labels);
        }
        for child in &mut c.children {
            category(child, labels);
        }
    }

    let mut out = t.clone();
    for c in &mut out.categories {
        category(c, &strings.labels);
    }
    out
}
