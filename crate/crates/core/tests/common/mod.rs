// SPDX-License-Identifier: Apache-2.0
//! Seeded generators for typologies, instances and annotation sets.
//!
//! Proptest supplies the seed; everything below is a deterministic function
//! of it, so a failing seed reproduces exactly.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub mod mutate;
pub mod snap_oracle;

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use thresh_core::data::{AnnotationSet, Answer, Edit, Instance, InstanceAnnotations};
use thresh_core::span::{compute_boundaries, BoundarySet, Side};
use thresh_core::typology::locale::english_keys;
use thresh_core::typology::{
    Boundary, Display, EditCategory, InstructionsDisplay, LocalePack, Mode, QuestionKind,
    QuestionNode, Selection, SideRule, TemplateConfig, Typology,
};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Strings that stress YAML quoting and Unicode handling.
const AWKWARD: &[&str] = &[
    "plain",
    "yes",
    "null",
    "1.5",
    "~",
    "a: b",
    "#hash",
    "- dash",
    "  leading",
    "trailing  ",
    "quote \" and ' both",
    "é accent",
    "日本語",
    "emoji 🎉",
    "two\nlines",
    "ends with newline\n",
    "tab\there",
    "[brackets]",
    "{braces}",
    "percent %",
];

pub fn label(r: &mut StdRng) -> String {
    if r.random_bool(0.5) {
        AWKWARD.choose(r).unwrap().to_string()
    } else {
        format!("Label {}", r.random_range(0..1000))
    }
}

fn color(r: &mut StdRng) -> String {
    format!("#{:06x}", r.random_range(0..0x100_0000u32))
}

fn kind(r: &mut StdRng) -> QuestionKind {
    *[
        QuestionKind::Binary,
        QuestionKind::Scale3,
        QuestionKind::Scale5,
        QuestionKind::Textbox,
    ]
    .choose(r)
    .unwrap()
}

fn question(r: &mut StdRng, next_id: &mut usize, depth: usize) -> QuestionNode {
    let k = kind(r);
    let options: Vec<String> = (0..k.arity()).map(|_| label(r)).collect();
    let opt_refs: Vec<&str> = options.iter().map(String::as_str).collect();
    let id = format!("q{next_id}");
    *next_id += 1;
    let mut q = QuestionNode::new(&id, k, &label(r), &opt_refs);
    if k == QuestionKind::Textbox {
        q.optional = r.random_bool(0.5);
    }
    if depth >= 3 {
        return q;
    }
    if k == QuestionKind::Textbox {
        if r.random_bool(0.3) {
            q.followups.any.push(question(r, next_id, depth + 1));
        }
    } else {
        for opt in 0..k.arity() {
            if r.random_bool(0.25) {
                let n = r.random_range(1..=2);
                let list = (0..n).map(|_| question(r, next_id, depth + 1)).collect();
                q.followups.by_option.insert(opt, list);
            }
        }
    }
    q
}

fn questions(r: &mut StdRng) -> Vec<QuestionNode> {
    let mut next_id = 0;
    let n = r.random_range(0..=2);
    (0..n).map(|_| question(r, &mut next_id, 1)).collect()
}

fn leaf(r: &mut StdRng, name: String) -> EditCategory {
    let side = *[SideRule::Source, SideRule::Target, SideRule::Both]
        .choose(r)
        .unwrap();
    let selection = if r.random_bool(0.5) {
        Selection::SingleSpan
    } else {
        Selection::MultiSpan
    };
    let mut c = EditCategory::new(&name, &label(r), &color(r), side, selection);
    c.questions = questions(r);
    c
}

pub fn config(r: &mut StdRng) -> TemplateConfig {
    let opt = |r: &mut StdRng| {
        if r.random_bool(0.5) {
            Some(label(r))
        } else {
            None
        }
    };
    TemplateConfig {
        boundary: *[Boundary::Char, Boundary::Whitespace, Boundary::Subword]
            .choose(r)
            .unwrap(),
        mode: *[Mode::Full, Mode::SelectionOnly, Mode::AnnotationOnly]
            .choose(r)
            .unwrap(),
        adjudication: r.random_range(1..=3),
        language: ["en", "es"].choose(r).unwrap().to_string(),
        instructions: if r.random_bool(0.5) {
            Some("# Title\n\nSome *markdown* text.\n".into())
        } else {
            None
        },
        instructions_display: *[InstructionsDisplay::Modal, InstructionsDisplay::Prepend]
            .choose(r)
            .unwrap(),
        display: *[Display::Inline, Display::SideBySide].choose(r).unwrap(),
        citation: if r.random_bool(0.5) {
            Some("@misc{key,\n  title = {T: {Nested}}\n}\n".into())
        } else {
            None
        },
        paper_link: opt(r),
        demo_data_link: None,
    }
}

/// A random valid typology: up to four top-level categories, some of them
/// composites with leaf children, each with a random question forest.
pub fn typology(r: &mut StdRng) -> Typology {
    let mut next = 0;
    let mut name = || {
        next += 1;
        format!("c{next}")
    };
    let mut cats = Vec::new();
    for _ in 0..r.random_range(1..=4) {
        if r.random_bool(0.3) {
            let mut c = EditCategory::new(
                &name(),
                &label(r),
                &color(r),
                SideRule::Both,
                Selection::Composite,
            );
            c.questions = questions(r);
            for _ in 0..r.random_range(1..=3) {
                c.children.push(leaf(r, name()));
            }
            cats.push(c);
        } else {
            cats.push(leaf(r, name()));
        }
    }
    let mut t = Typology::new(&format!("t-{}", r.random_range(0..100)), cats);
    t.config = config(r);
    if r.random_bool(0.5) {
        let mut strings = BTreeMap::new();
        let english: Vec<&str> = english_keys().into_iter().collect();
        for _ in 0..3 {
            strings.insert(english.choose(r).unwrap().to_string(), label(r));
        }
        let labels: Vec<String> = t.label_keys().into_keys().collect();
        strings.insert(labels.choose(r).unwrap().clone(), label(r));
        t.localization.insert(
            "fr".into(),
            LocalePack {
                locale: "fr".into(),
                strings,
            },
        );
        if r.random_bool(0.5) {
            t.config.language = "fr".into();
        }
    }
    t
}

/// Flat, single-span categories whose only question is a `severity` scale:
/// the feature set the offset-label format can carry.
pub fn severity_typology(r: &mut StdRng) -> Typology {
    let cats = (0..r.random_range(1..=5))
        .map(|i| {
            let side = if r.random_bool(0.3) {
                SideRule::Source
            } else {
                SideRule::Target
            };
            let mut c = EditCategory::new(
                &format!("err-{i}"),
                &label(r),
                &color(r),
                side,
                Selection::SingleSpan,
            );
            if r.random_bool(0.7) {
                c.questions.push(QuestionNode::new(
                    "severity",
                    QuestionKind::Scale3,
                    "Severity",
                    &["minor", "major", "critical"],
                ));
            }
            c
        })
        .collect();
    let mut t = Typology::new("severity-only", cats);
    t.config.boundary = *[Boundary::Char, Boundary::Whitespace].choose(r).unwrap();
    t
}

const WORDS: &[&str] = &[
    "the",
    "cat",
    "sat",
    "naïve",
    "café",
    "über",
    "x",
    "日本語",
    "テキスト",
    "🎉",
    "a-b",
    "it's",
];
const CJK: &[char] = &[
    '日', '本', '語', '文', '字', '中', '国', '話', 'テ', 'キ', 'ス', 'ト',
];

/// Random text with at least one non-whitespace character. A third of the
/// texts contain no whitespace at all.
pub fn text(r: &mut StdRng) -> String {
    if r.random_bool(0.33) {
        (0..r.random_range(1..=12))
            .map(|_| *CJK.choose(r).unwrap())
            .collect()
    } else {
        let n = r.random_range(1..=8);
        let mut s = String::new();
        if r.random_bool(0.2) {
            s.push(' ');
        }
        for i in 0..n {
            if i > 0 {
                s.push_str([" ", "  ", "\t", "\n", " \u{3000}"].choose(r).unwrap());
            }
            s.push_str(WORDS.choose(r).unwrap());
        }
        if r.random_bool(0.2) {
            s.push(' ');
        }
        s
    }
}

/// Subword tokens: every whitespace-delimited word split into random pieces.
pub fn subword_bounds(r: &mut StdRng, text: &str) -> BoundarySet {
    let words = compute_boundaries(text, Boundary::Whitespace).unwrap();
    let (mut starts, mut ends) = (Vec::new(), Vec::new());
    for (&s, &e) in words.starts.iter().zip(&words.ends) {
        let mut pos = s;
        while pos < e {
            let step = r.random_range(1..=(e - pos).min(3));
            starts.push(pos);
            ends.push(pos + step);
            pos += step;
        }
    }
    BoundarySet { starts, ends }
}

pub fn instances(r: &mut StdRng, t: &Typology) -> Vec<Instance> {
    (0..r.random_range(1..=4))
        .map(|i| {
            let source = if t.source_selectable() || r.random_bool(0.5) {
                Some(text(r))
            } else {
                None
            };
            let mut inst = Instance::new(&format!("i{i}"), source.as_deref(), &text(r));
            if r.random_bool(0.3) {
                inst.context = Some(label(r));
            }
            if t.config.boundary == Boundary::Subword {
                inst.token_bounds_target = Some(subword_bounds(r, &inst.target));
                inst.token_bounds_source = inst.source.clone().map(|s| subword_bounds(r, &s));
            }
            inst
        })
        .collect()
}

/// Up to `max` disjoint spans on one side, each covering whole tokens.
fn spans(r: &mut StdRng, bounds: &BoundarySet, max: usize) -> Vec<(usize, usize)> {
    let n = bounds.starts.len();
    let mut out = Vec::new();
    let mut pos = 0;
    while out.len() < max && pos < n {
        let i = r.random_range(pos..n);
        let j = r.random_range(i..n.min(i + 3));
        out.push((bounds.starts[i], bounds.ends[j]));
        pos = j + 1;
        if !r.random_bool(0.5) {
            break;
        }
    }
    out
}

fn answer_tree(r: &mut StdRng, q: &QuestionNode, out: &mut Vec<Answer>) {
    if q.kind == QuestionKind::Textbox {
        let text = if q.optional && r.random_bool(0.3) {
            String::new()
        } else {
            label(r)
        };
        out.push(Answer::text(&q.id, &text));
        for f in q.triggered(None) {
            answer_tree(r, f, out);
        }
    } else {
        let o = r.random_range(0..q.kind.arity());
        out.push(Answer::option(&q.id, o));
        for f in q.triggered(Some(o)) {
            answer_tree(r, f, out);
        }
    }
}

fn leaf_edit(r: &mut StdRng, t: &Typology, cat: &EditCategory, inst: &Instance) -> Option<Edit> {
    let mut e = Edit::new(&cat.name);
    for side in [Side::Source, Side::Target] {
        let allowed = match side {
            Side::Source => cat.side.allows_source(),
            Side::Target => cat.side.allows_target(),
        };
        if !allowed {
            continue;
        }
        let bounds = inst.bounds(side, t.config.boundary)?;
        let max = if cat.selection == Selection::SingleSpan {
            1
        } else {
            3
        };
        for (s, end) in spans(r, &bounds, max) {
            e = e.with_span(side, s, end, t.config.boundary);
        }
    }
    Some(e)
}

fn answers(r: &mut StdRng, t: &Typology, cat: &EditCategory) -> Vec<Answer> {
    let mut out = Vec::new();
    if t.config.mode != Mode::SelectionOnly {
        for q in &cat.questions {
            answer_tree(r, q, &mut out);
        }
    }
    out
}

fn edit(r: &mut StdRng, t: &Typology, inst: &Instance) -> Option<Edit> {
    let cats = t.flatten();
    let cat = *cats.choose(r).unwrap();
    let mut e = if cat.selection == Selection::Composite {
        let mut e = Edit::new(&cat.name);
        for _ in 0..r.random_range(1..=2) {
            let child = cat.children.choose(r).unwrap();
            let mut c = leaf_edit(r, t, child, inst)?;
            c.answers = answers(r, t, child);
            e.children.push(c);
        }
        e
    } else {
        leaf_edit(r, t, cat, inst)?
    };
    e.answers = answers(r, t, cat);
    Some(e)
}

/// A random annotation set that is valid for `t` and `instances`.
pub fn annotation_set(
    r: &mut StdRng,
    t: &Typology,
    instances: &[Instance],
    annotator: &str,
) -> AnnotationSet {
    let mut set = AnnotationSet::new(&t.name, annotator);
    if r.random_bool(0.5) {
        set.metadata
            .insert("tool_version".into(), serde_json::json!(label(r)));
        set.metadata.insert(
            "seconds".into(),
            serde_json::json!(r.random_range(0..10_000)),
        );
    }
    for inst in instances {
        if r.random_bool(0.2) {
            continue;
        }
        let edits = (0..r.random_range(0..=3))
            .filter_map(|_| edit(r, t, inst))
            .collect();
        set.instances.push(InstanceAnnotations {
            id: inst.id.clone(),
            edits,
        });
    }
    set
}
