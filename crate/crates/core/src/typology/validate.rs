// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use super::locale;
use super::model::*;
use crate::diagnostic::{codes, Diagnostic};

pub const MAX_QUESTION_DEPTH: usize = 16;

/// `[a-z0-9_-]+`
pub fn is_typology_name(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
}

/// `[A-Za-z0-9_-]+`, used for category names and question ids.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

pub fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].bytes().all(|b| b.is_ascii_hexdigit())
}

/// Check every typology invariant. Diagnostics come back in document order.
pub fn validate_typology(t: &Typology) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !is_typology_name(&t.name) {
        out.push(Diagnostic::error(
            codes::BAD_NAME,
            "name",
            format!("typology name `{}` must match [a-z0-9_-]+", t.name),
        ));
    }
    if !(1..=3).contains(&t.config.adjudication) {
        out.push(Diagnostic::error(
            codes::ADJUDICATION,
            "config.adjudication",
            format!(
                "adjudication must be 1, 2 or 3, found {}",
                t.config.adjudication
            ),
        ));
    }
    if !locale::is_builtin(&t.config.language) && !t.localization.contains_key(&t.config.language) {
        out.push(Diagnostic::error(
            codes::BAD_VALUE,
            "config.language",
            format!(
                "language `{}` has no built-in pack and no template override",
                t.config.language
            ),
        ));
    }
    if t.categories.is_empty() {
        out.push(Diagnostic::error(
            codes::NO_CATEGORIES,
            "edits",
            "a typology needs at least one edit category",
        ));
    }

    let mut seen = HashSet::new();
    for (i, cat) in t.categories.iter().enumerate() {
        check_category(cat, &format!("edits[{i}]"), false, &mut seen, &mut out);
    }

    let label_keys = t.label_keys();
    let builtin = locale::english_keys();
    for (code, pack) in &t.localization {
        for key in pack.strings.keys() {
            if !builtin.contains(key.as_str()) && !label_keys.contains_key(key) {
                out.push(Diagnostic::error(
                    codes::LOCALE_KEY,
                    format!("localization.{code}.{key}"),
                    format!("`{key}` is neither a built-in interface string nor a template label"),
                ));
            }
        }
    }
    out
}

fn check_category(
    cat: &EditCategory,
    path: &str,
    is_child: bool,
    seen: &mut HashSet<String>,
    out: &mut Vec<Diagnostic>,
) {
    if !is_identifier(&cat.name) {
        out.push(Diagnostic::error(
            codes::BAD_NAME,
            format!("{path}.name"),
            format!("category name `{}` must match [A-Za-z0-9_-]+", cat.name),
        ));
    }
    if !seen.insert(cat.name.clone()) {
        out.push(Diagnostic::error(
            codes::DUP_CATEGORY,
            format!("{path}.name"),
            format!("category `{}` is defined more than once", cat.name),
        ));
    }
    if !is_hex_color(&cat.color) {
        out.push(Diagnostic::error(
            codes::BAD_COLOR,
            format!("{path}.color"),
            format!("color `{}` is not #RRGGBB", cat.color),
        ));
    }
    match (cat.selection, cat.children.is_empty()) {
        (Selection::Composite, true) => out.push(Diagnostic::error(
            codes::COMPOSITE_EMPTY,
            format!("{path}.children"),
            format!("composite category `{}` has no children", cat.name),
        )),
        (Selection::Composite, false) if is_child => out.push(Diagnostic::error(
            codes::NESTED_COMPOSITE,
            format!("{path}.selection"),
            format!("`{}` is a composite inside a composite", cat.name),
        )),
        (Selection::SingleSpan | Selection::MultiSpan, false) => out.push(Diagnostic::error(
            codes::CHILDREN_NOT_COMPOSITE,
            format!("{path}.children"),
            format!(
                "`{}` has children but selection is {}",
                cat.name, cat.selection
            ),
        )),
        _ => {}
    }

    let mut ids = HashSet::new();
    for (i, q) in cat.questions.iter().enumerate() {
        check_question(q, &format!("{path}.questions[{i}]"), 1, &mut ids, out);
    }
    for (i, child) in cat.children.iter().enumerate() {
        check_category(child, &format!("{path}.children[{i}]"), true, seen, out);
    }
}

fn check_question(
    q: &QuestionNode,
    path: &str,
    depth: usize,
    ids: &mut HashSet<String>,
    out: &mut Vec<Diagnostic>,
) {
    if depth > MAX_QUESTION_DEPTH {
        out.push(Diagnostic::error(
            codes::TREE_DEPTH,
            path,
            format!("question tree deeper than {MAX_QUESTION_DEPTH} levels"),
        ));
        return;
    }
    if !is_identifier(&q.id) {
        out.push(Diagnostic::error(
            codes::BAD_NAME,
            format!("{path}.id"),
            format!("question id `{}` must match [A-Za-z0-9_-]+", q.id),
        ));
    }
    if !ids.insert(q.id.clone()) {
        out.push(Diagnostic::error(
            codes::DUP_QUESTION,
            format!("{path}.id"),
            format!("question id `{}` is used twice in this category", q.id),
        ));
    }
    let arity = q.kind.arity();
    if q.options.len() != arity {
        out.push(Diagnostic::error(
            codes::OPTION_COUNT,
            format!("{path}.options"),
            format!(
                "{} question needs {arity} option labels, found {}",
                q.kind,
                q.options.len()
            ),
        ));
    }
    if q.kind == QuestionKind::Textbox {
        if !q.followups.by_option.is_empty() {
            out.push(Diagnostic::error(
                codes::FOLLOWUP_KEY,
                format!("{path}.followups"),
                "textbox followups must be listed under `any`",
            ));
        }
    } else {
        if !q.followups.any.is_empty() {
            out.push(Diagnostic::error(
                codes::FOLLOWUP_KEY,
                format!("{path}.followups.any"),
                "`any` followups are only allowed on textbox questions",
            ));
        }
        for &idx in q.followups.by_option.keys() {
            if idx >= arity {
                out.push(Diagnostic::error(
                    codes::FOLLOWUP_KEY,
                    format!("{path}.followups.{idx}"),
                    format!(
                        "option index {idx} is out of range for a {} question",
                        q.kind
                    ),
                ));
            }
        }
    }
    for (key, list) in q.followups.by_option.iter() {
        for (i, child) in list.iter().enumerate() {
            check_question(
                child,
                &format!("{path}.followups.{key}[{i}]"),
                depth + 1,
                ids,
                out,
            );
        }
    }
    for (i, child) in q.followups.any.iter().enumerate() {
        check_question(
            child,
            &format!("{path}.followups.any[{i}]"),
            depth + 1,
            ids,
            out,
        );
    }
}
