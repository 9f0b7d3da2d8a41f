// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::markdown::{render_instructions, Block};
use super::CompileError;
use crate::canonical::to_canonical_string;
use crate::data::{check_annotation_set, edit_to_json, AnnotationSet, Instance};
use crate::diagnostic::{codes, Diagnostic};
use crate::span::{BoundarySet, Side};
use crate::typology::{
    localize_labels, resolve_locale, validate_typology, Boundary, Display, EditCategory,
    InstructionsDisplay, Mode, QuestionKind, QuestionNode, Selection, SideRule, TemplateError,
    Typology,
};

pub const IR_VERSION: &str = "1.0";

/// Everything the annotation UI needs to render one session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceIr {
    pub ir_version: String,
    pub typology: String,
    pub config: IrConfig,
    pub strings: BTreeMap<String, String>,
    pub instructions: Option<Vec<Block>>,
    pub palette: Vec<IrCategory>,
    pub instances: Vec<IrInstance>,
    pub panes: Vec<IrPane>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrConfig {
    pub boundary: Boundary,
    pub mode: Mode,
    pub adjudication: u8,
    pub language: String,
    pub instructions_display: InstructionsDisplay,
    pub display: Display,
    pub citation: Option<String>,
    pub paper_link: Option<String>,
    pub demo_data_link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrCategory {
    pub name: String,
    pub label: String,
    pub color: String,
    pub side: SideRule,
    pub selection: Selection,
    pub children: Vec<IrCategory>,
    pub questions: Vec<IrQuestion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrQuestion {
    pub id: String,
    pub kind: QuestionKind,
    pub prompt: String,
    pub options: Vec<String>,
    pub optional: bool,
    /// Keyed by option index (`"0"`, `"1"`, ...) or `"any"` for textboxes.
    pub followups: BTreeMap<String, Vec<IrQuestion>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrBounds {
    pub source: Option<BoundarySet>,
    pub target: Option<BoundarySet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrInstance {
    pub id: String,
    pub source: Option<String>,
    pub target: String,
    pub context: Option<String>,
    pub context_before: Option<String>,
    pub context_after: Option<String>,
    pub bounds: IrBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrPane {
    pub annotator: Option<String>,
    pub spans_read_only: bool,
    /// One entry per instance, in instance order, in every pane.
    pub entries: Vec<IrPaneEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrPaneEntry {
    pub id: String,
    /// Whether the annotator has an entry for this instance (an entry with
    /// no edits is an explicit "no edits" confirmation).
    pub confirmed: bool,
    pub edits: Vec<serde_json::Value>,
}

impl InterfaceIr {
    /// Canonical JSON, the wire format served to the UI.
    pub fn to_json(&self) -> String {
        to_canonical_string(self)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    /// Overrides `config.language`.
    pub locale: Option<String>,
    /// Existing annotations, one set per pane, in pane order.
    pub annotations: Vec<AnnotationSet>,
    /// Overrides `config.adjudication` as the pane count.
    pub panes: Option<usize>,
}

pub fn compile(
    t: &Typology,
    instances: &[Instance],
    opts: &CompileOptions,
) -> Result<InterfaceIr, CompileError> {
    let mut diags: Vec<Diagnostic> = validate_typology(t)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect();
    if !diags.is_empty() {
        return Err(CompileError::Invalid(diags));
    }

    let pane_count = opts.panes.unwrap_or(t.config.adjudication as usize);
    if !(1..=3).contains(&pane_count) {
        diags.push(Diagnostic::error(
            codes::ADJUDICATION,
            "panes",
            format!("{pane_count} panes requested; 1 to 3 supported"),
        ));
    }
    if opts.annotations.len() > pane_count {
        diags.push(Diagnostic::error(
            codes::ADJUDICATION,
            "annotations",
            format!(
                "{} annotation sets for {pane_count} panes",
                opts.annotations.len()
            ),
        ));
    }
    if t.config.mode == Mode::AnnotationOnly && opts.annotations.iter().all(|a| a.edit_count() == 0)
    {
        diags.push(Diagnostic::error(
            codes::NEEDS_ANNOTATIONS,
            "annotations",
            "annotation_only mode needs existing annotations with spans",
        ));
    }
    let mut ids = std::collections::HashSet::new();
    for inst in instances {
        if !ids.insert(inst.id.as_str()) {
            diags.push(Diagnostic::error(
                codes::DUP_ID,
                inst.id.clone(),
                format!("duplicate instance id `{}`", inst.id),
            ));
        }
    }
    for (i, set) in opts.annotations.iter().enumerate() {
        for mut d in check_annotation_set(set, t, Some(instances))
            .into_iter()
            .filter(Diagnostic::is_error)
        {
            d.path = format!("annotations[{i}].{}", d.path);
            diags.push(d);
        }
    }
    if !diags.is_empty() {
        return Err(CompileError::Invalid(diags));
    }

    let locale = opts
        .locale
        .clone()
        .unwrap_or_else(|| t.config.language.clone());
    let strings = resolve_locale(t, &locale).map_err(|e| match e {
        TemplateError::UnknownLocale(c) => CompileError::UnknownLocale(c),
        other => CompileError::Invalid(other.diagnostics()),
    })?;
    let localized = localize_labels(t, &strings);

    let with_questions = t.config.mode.has_questions();
    let palette = localized
        .categories
        .iter()
        .map(|c| ir_category(c, with_questions))
        .collect();

    let source_selectable = t.source_selectable();
    let target_selectable = t.target_selectable();
    let mut ir_instances = Vec::with_capacity(instances.len());
    for inst in instances {
        let mut bounds = IrBounds {
            source: None,
            target: None,
        };
        for side in [Side::Target, Side::Source] {
            let selectable = match side {
                Side::Source => source_selectable && inst.source.is_some(),
                Side::Target => target_selectable,
            };
            if !selectable {
                continue;
            }
            let b = inst
                .bounds(side, t.config.boundary)
                .ok_or_else(|| CompileError::MissingBounds {
                    instance_id: inst.id.clone(),
                    side,
                })?
                .into_owned();
            match side {
                Side::Source => bounds.source = Some(b),
                Side::Target => bounds.target = Some(b),
            }
        }
        ir_instances.push(IrInstance {
            id: inst.id.clone(),
            source: inst.source.clone(),
            target: inst.target.clone(),
            context: inst.context.clone(),
            context_before: inst.context_before.clone(),
            context_after: inst.context_after.clone(),
            bounds,
        });
    }

    let read_only = t.config.mode == Mode::AnnotationOnly;
    let panes = (0..pane_count)
        .map(|p| {
            let set = opts.annotations.get(p);
            let by_id: HashMap<&str, _> = set
                .map(|s| s.instances.iter().map(|e| (e.id.as_str(), e)).collect())
                .unwrap_or_default();
            IrPane {
                annotator: set.map(|s| s.annotator_id.clone()),
                spans_read_only: read_only,
                entries: instances
                    .iter()
                    .map(|inst| {
                        let entry = by_id.get(inst.id.as_str());
                        IrPaneEntry {
                            id: inst.id.clone(),
                            confirmed: entry.is_some(),
                            edits: entry
                                .map(|e| e.edits.iter().map(edit_to_json).collect())
                                .unwrap_or_default(),
                        }
                    })
                    .collect(),
            }
        })
        .collect();

    let cfg = &t.config;
    Ok(InterfaceIr {
        ir_version: IR_VERSION.to_string(),
        typology: t.name.clone(),
        config: IrConfig {
            boundary: cfg.boundary,
            mode: cfg.mode,
            adjudication: pane_count as u8,
            language: locale,
            instructions_display: cfg.instructions_display,
            display: cfg.display,
            citation: cfg.citation.clone(),
            paper_link: cfg.paper_link.clone(),
            demo_data_link: cfg.demo_data_link.clone(),
        },
        strings: strings.ui,
        instructions: cfg.instructions.as_deref().map(render_instructions),
        palette,
        instances: ir_instances,
        panes,
    })
}

fn ir_category(c: &EditCategory, with_questions: bool) -> IrCategory {
    IrCategory {
        name: c.name.clone(),
        label: c.label.clone(),
        color: c.color.clone(),
        side: c.side,
        selection: c.selection,
        children: c
            .children
            .iter()
            .map(|k| ir_category(k, with_questions))
            .collect(),
        questions: if with_questions {
            c.questions.iter().map(ir_question).collect()
        } else {
            Vec::new()
        },
    }
}

fn ir_question(q: &QuestionNode) -> IrQuestion {
    let mut followups = BTreeMap::new();
    for (idx, list) in &q.followups.by_option {
        followups.insert(idx.to_string(), list.iter().map(ir_question).collect());
    }
    if !q.followups.any.is_empty() {
        followups.insert(
            "any".to_string(),
            q.followups.any.iter().map(ir_question).collect(),
        );
    }
    IrQuestion {
        id: q.id.clone(),
        kind: q.kind,
        prompt: q.prompt.clone(),
        options: q.options.clone(),
        optional: q.optional,
        followups,
    }
}
