// SPDX-License-Identifier: Apache-2.0

//! Validation of annotation sets against a typology and instance texts.

use std::collections::{HashMap, HashSet};

use super::annotation::{AnnotationSet, Answer, AnswerValue, Edit};
use super::instance::Instance;
use crate::diagnostic::{codes, Diagnostic};
use crate::span::{overlapping_pairs, validate_span, Side};
use crate::typology::{EditCategory, Mode, QuestionKind, QuestionNode, Selection, Typology};

/// All diagnostics for `set`. Span legality against texts is only checked
/// when `instances` is given.
pub fn check_annotation_set(
    set: &AnnotationSet,
    t: &Typology,
    instances: Option<&[Instance]>,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if set.typology_name != t.name {
        out.push(Diagnostic::error(
            codes::TYPOLOGY_MISMATCH,
            "typology_name",
            format!(
                "annotations are for `{}` but the template is `{}`",
                set.typology_name, t.name
            ),
        ));
    }
    let by_id: Option<HashMap<&str, &Instance>> =
        instances.map(|v| v.iter().map(|i| (i.id.as_str(), i)).collect());
    let mut seen = HashSet::new();
    for entry in &set.instances {
        let base = format!("instances[{}]", entry.id);
        if !seen.insert(entry.id.as_str()) {
            out.push(Diagnostic::error(
                codes::DUP_ENTRY_IN_FILE,
                base.clone(),
                format!("instance `{}` appears more than once", entry.id),
            ));
        }
        let instance = match &by_id {
            Some(map) => match map.get(entry.id.as_str()) {
                Some(i) => Some(*i),
                None => {
                    out.push(Diagnostic::error(
                        codes::UNKNOWN_INSTANCE,
                        base.clone(),
                        format!("no instance with id `{}`", entry.id),
                    ));
                    continue;
                }
            },
            None => None,
        };
        for (i, edit) in entry.edits.iter().enumerate() {
            check_edit(
                edit,
                t,
                instance,
                None,
                &format!("{base}.edits[{i}]"),
                &mut out,
            );
        }
    }
    out
}

fn check_edit(
    edit: &Edit,
    t: &Typology,
    instance: Option<&Instance>,
    parent: Option<&EditCategory>,
    path: &str,
    out: &mut Vec<Diagnostic>,
) {
    let Some(cat) = t.category(&edit.category) else {
        out.push(Diagnostic::error(
            codes::UNKNOWN_CATEGORY,
            format!("{path}.category"),
            format!("unknown category `{}`", edit.category),
        ));
        return;
    };
    // Child categories may also be used as standalone edits.
    if let Some(p) = parent {
        if !p.children.iter().any(|c| c.name == cat.name) {
            out.push(Diagnostic::error(
                codes::COMPOSITE_CHILD,
                format!("{path}.category"),
                format!(
                    "`{}` is not a declared child of composite `{}`",
                    cat.name, p.name
                ),
            ));
        }
    }

    if cat.selection == Selection::Composite {
        if !edit.source.is_empty() || !edit.target.is_empty() {
            out.push(Diagnostic::error(
                codes::COMPOSITE_SPANS,
                path,
                "composite edits select spans through their children",
            ));
        }
        if edit.children.is_empty() {
            out.push(Diagnostic::error(
                codes::COMPOSITE_CHILD,
                format!("{path}.children"),
                format!("composite edit `{}` has no child edits", cat.name),
            ));
        }
        for (i, child) in edit.children.iter().enumerate() {
            check_edit(
                child,
                t,
                instance,
                Some(cat),
                &format!("{path}.children[{i}]"),
                out,
            );
        }
    } else {
        if !edit.children.is_empty() {
            out.push(Diagnostic::error(
                codes::UNEXPECTED_CHILDREN,
                format!("{path}.children"),
                format!("`{}` is not a composite category", cat.name),
            ));
        }
        check_spans(edit, cat, t, instance, path, out);
    }
    check_answers(
        &edit.answers,
        cat,
        t.config.mode,
        &format!("{path}.answers"),
        out,
    );
}

fn check_spans(
    edit: &Edit,
    cat: &EditCategory,
    t: &Typology,
    instance: Option<&Instance>,
    path: &str,
    out: &mut Vec<Diagnostic>,
) {
    for side in [Side::Source, Side::Target] {
        let spans = edit.spans(side);
        let allowed = match side {
            Side::Source => cat.side.allows_source(),
            Side::Target => cat.side.allows_target(),
        };
        let group_path = format!("{path}.{side}");
        if !allowed {
            if !spans.is_empty() {
                out.push(Diagnostic::error(
                    codes::SPAN_SIDE,
                    group_path,
                    format!("`{}` selects on the {} only", cat.name, cat.side),
                ));
            }
            continue;
        }
        let count_ok = match cat.selection {
            Selection::SingleSpan => spans.len() == 1,
            _ => !spans.is_empty(),
        };
        if !count_ok {
            let want = if cat.selection == Selection::SingleSpan {
                "exactly one"
            } else {
                "at least one"
            };
            out.push(Diagnostic::error(
                codes::SPAN_COUNT,
                group_path.clone(),
                format!(
                    "`{}` needs {want} {side} span, found {}",
                    cat.name,
                    spans.len()
                ),
            ));
        }
        for (a, b) in overlapping_pairs(spans) {
            out.push(Diagnostic::error(
                codes::SPAN_OVERLAP,
                format!("{group_path}[{b}]"),
                format!("spans {a} and {b} of one edit overlap"),
            ));
        }
        for (i, span) in spans.iter().enumerate() {
            let span_path = format!("{group_path}[{i}]");
            if span.side != side {
                out.push(Diagnostic::error(
                    codes::SPAN_SIDE,
                    span_path.clone(),
                    "span side does not match its group",
                ));
            }
            if span.granularity != t.config.boundary {
                out.push(Diagnostic::error(
                    codes::SPAN_GRANULARITY,
                    span_path.clone(),
                    format!(
                        "span granularity {} differs from template boundary {}",
                        span.granularity, t.config.boundary
                    ),
                ));
            }
            if span.start >= span.end {
                out.push(Diagnostic::error(
                    codes::SPAN_RANGE,
                    span_path,
                    format!("span [{}, {}) is empty or reversed", span.start, span.end),
                ));
                continue;
            }
            let Some(inst) = instance else { continue };
            let Some(text) = inst.text(side) else {
                out.push(Diagnostic::error(
                    codes::NO_SOURCE,
                    span_path,
                    format!("instance `{}` has no {side} text", inst.id),
                ));
                continue;
            };
            let Some(bounds) = inst.bounds(side, t.config.boundary) else {
                out.push(Diagnostic::error(
                    codes::BAD_BOUNDS,
                    span_path,
                    format!(
                        "instance `{}` has no token boundaries for the {side}",
                        inst.id
                    ),
                ));
                continue;
            };
            for mut d in validate_span(span, text, &bounds) {
                d.path = span_path.clone();
                d.message = format!("instance `{}`: {}", inst.id, d.message);
                out.push(d);
            }
        }
    }
}

/// Where a question sits: its parent and the option index that triggers it
/// (`None` for textbox `any` followups and for roots).
struct Placement<'a> {
    node: &'a QuestionNode,
    parent: Option<(&'a QuestionNode, Option<usize>)>,
}

fn placements(cat: &EditCategory) -> HashMap<&str, Placement<'_>> {
    fn go<'a>(
        node: &'a QuestionNode,
        parent: Option<(&'a QuestionNode, Option<usize>)>,
        out: &mut HashMap<&'a str, Placement<'a>>,
    ) {
        out.entry(node.id.as_str())
            .or_insert(Placement { node, parent });
        for (idx, list) in &node.followups.by_option {
            for child in list {
                go(child, Some((node, Some(*idx))), out);
            }
        }
        for child in &node.followups.any {
            go(child, Some((node, None)), out);
        }
    }
    let mut out = HashMap::new();
    for q in &cat.questions {
        go(q, None, &mut out);
    }
    out
}

fn triggers(parent_answer: &AnswerValue, trigger: Option<usize>) -> bool {
    match (parent_answer, trigger) {
        (AnswerValue::Option(given), Some(want)) => *given == want,
        (AnswerValue::Text(_), None) => true,
        _ => false,
    }
}

/// Answers must form a traversal of the question tree in order: each
/// answered followup's parent is answered earlier with the triggering
/// option. In `full` mode every triggered question must be answered.
fn check_answers(
    answers: &[Answer],
    cat: &EditCategory,
    mode: Mode,
    path: &str,
    out: &mut Vec<Diagnostic>,
) {
    if mode == Mode::SelectionOnly {
        if !answers.is_empty() {
            out.push(Diagnostic::error(
                codes::ANSWERS_NOT_ALLOWED,
                path,
                "answers are not collected in selection_only mode",
            ));
        }
        return;
    }
    let places = placements(cat);
    let mut answered: HashMap<&str, &AnswerValue> = HashMap::new();
    for (i, a) in answers.iter().enumerate() {
        let apath = format!("{path}[{i}]");
        let Some(place) = places.get(a.question.as_str()) else {
            out.push(Diagnostic::error(
                codes::UNKNOWN_QUESTION,
                apath,
                format!("`{}` has no question `{}`", cat.name, a.question),
            ));
            continue;
        };
        if answered.contains_key(a.question.as_str()) {
            out.push(Diagnostic::error(
                codes::DUP_ANSWER,
                apath,
                format!("question `{}` answered twice", a.question),
            ));
            continue;
        }
        let q = place.node;
        match (&a.value, q.kind) {
            (AnswerValue::Text(_), k) if k != QuestionKind::Textbox => out.push(Diagnostic::error(
                codes::ANSWER_KIND,
                apath.clone(),
                format!("question `{}` expects an option index", q.id),
            )),
            (AnswerValue::Option(_), QuestionKind::Textbox) => out.push(Diagnostic::error(
                codes::ANSWER_KIND,
                apath.clone(),
                format!("question `{}` expects text", q.id),
            )),
            (AnswerValue::Option(o), k) if *o >= k.arity() => out.push(Diagnostic::error(
                codes::ANSWER_RANGE,
                apath.clone(),
                format!("option {o} out of range for {k} question `{}`", q.id),
            )),
            (AnswerValue::Text(s), _) if s.is_empty() && !q.optional => {
                out.push(Diagnostic::error(
                    codes::EMPTY_TEXT,
                    apath.clone(),
                    format!("question `{}` requires a non-empty answer", q.id),
                ))
            }
            _ => {}
        }
        if let Some((parent, trigger)) = place.parent {
            let ok = answered
                .get(parent.id.as_str())
                .is_some_and(|v| triggers(v, trigger));
            if !ok {
                out.push(Diagnostic::error(
                    codes::UNTRIGGERED,
                    apath,
                    format!(
                        "`{}` is answered but its parent `{}` did not trigger it",
                        q.id, parent.id
                    ),
                ));
            }
        }
        answered.insert(a.question.as_str(), &a.value);
    }

    if mode != Mode::Full {
        return;
    }
    // Walk the triggered part of the tree and require an answer at each node.
    let mut stack: Vec<&QuestionNode> = cat.questions.iter().rev().collect();
    while let Some(q) = stack.pop() {
        match answered.get(q.id.as_str()) {
            None => out.push(Diagnostic::error(
                codes::MISSING_ANSWER,
                path,
                format!("question `{}` of `{}` is unanswered", q.id, cat.name),
            )),
            Some(AnswerValue::Option(o)) => stack.extend(q.triggered(Some(*o)).iter().rev()),
            Some(AnswerValue::Text(_)) => stack.extend(q.triggered(None).iter().rev()),
        }
    }
}

/// Subword templates need token arrays for every side an annotator can
/// select on. The same condition makes `compile` fail with
/// `MissingBounds`; this reports every offender at once.
pub fn check_instance_bounds(t: &Typology, instances: &[Instance]) -> Vec<Diagnostic> {
    if t.config.boundary != crate::typology::Boundary::Subword {
        return Vec::new();
    }
    let mut out = Vec::new();
    for inst in instances {
        for side in [Side::Target, Side::Source] {
            let selectable = match side {
                Side::Source => t.source_selectable() && inst.source.is_some(),
                Side::Target => t.target_selectable(),
            };
            if selectable && inst.token_bounds(side).is_none() {
                out.push(Diagnostic::error(
                    codes::MISSING_BOUNDS,
                    format!("instances[{}].token_bounds_{side}", inst.id),
                    format!("subword boundary mode needs token_bounds_{side}"),
                ));
            }
        }
    }
    out
}
