// SPDX-License-Identifier: Apache-2.0
//! Single-field corruptions of a valid annotation file. Each operator
//! changes one field so that the file no longer validates.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{json, Value};
use thresh_core::data::{parse_annotations, serialize_annotations};
use thresh_core::span::char_len;
use thresh_core::typology::{Mode, Typology};

pub type Mutation = fn(&mut Value, &mut StdRng, &Ctx) -> Option<()>;

pub struct Ctx<'a> {
    t: &'a Typology,
    lens: BTreeMap<String, (Option<usize>, usize)>,
}

/// Every edit object in the file, children included, as JSON pointers.
fn edit_pointers(doc: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    fn walk(v: &Value, ptr: String, inst: &str, out: &mut Vec<(String, String)>) {
        out.push((ptr.clone(), inst.to_string()));
        if let Some(children) = v["children"].as_array() {
            for (i, c) in children.iter().enumerate() {
                walk(c, format!("{ptr}/children/{i}"), inst, out);
            }
        }
    }
    for (i, entry) in doc["instances"].as_array().unwrap().iter().enumerate() {
        let inst = entry["id"].as_str().unwrap();
        for (j, e) in entry["edits"].as_array().unwrap().iter().enumerate() {
            walk(e, format!("/instances/{i}/edits/{j}"), inst, &mut out);
        }
    }
    out
}

/// Span pointers with the owning instance id and side.
fn span_pointers(doc: &Value) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for (ptr, inst) in edit_pointers(doc) {
        for side in ["source", "target"] {
            if let Some(spans) = doc.pointer(&ptr).unwrap()[side].as_array() {
                for k in 0..spans.len() {
                    out.push((format!("{ptr}/{side}/{k}"), inst.clone(), side.to_string()));
                }
            }
        }
    }
    out
}

fn answer_pointers(doc: &Value) -> Vec<String> {
    let mut out = Vec::new();
    for (ptr, _) in edit_pointers(doc) {
        if let Some(a) = doc.pointer(&ptr).unwrap()["answers"].as_array() {
            out.extend((0..a.len()).map(|k| format!("{ptr}/answers/{k}")));
        }
    }
    out
}

fn pick<T: Clone>(r: &mut StdRng, v: &[T]) -> Option<T> {
    v.choose(r).cloned()
}

pub const MUTATIONS: &[(&str, Mutation)] = &[
    ("format_version", |d, _, _| {
        d["format_version"] = json!("0.9");
        Some(())
    }),
    ("typology_name", |d, _, c| {
        d["typology_name"] = json!(format!("{}-other", c.t.name));
        Some(())
    }),
    ("drop annotator", |d, _, _| {
        d.as_object_mut()?.remove("annotator_id");
        Some(())
    }),
    ("unknown top-level field", |d, _, _| {
        d["extra"] = json!(1);
        Some(())
    }),
    ("instance id", |d, r, _| {
        let n = d["instances"].as_array()?.len();
        let i = r.random_range(0..n.max(1));
        d.pointer_mut(&format!("/instances/{i}"))?["id"] = json!("no-such-instance");
        Some(())
    }),
    ("duplicate entry", |d, r, _| {
        let entries = d["instances"].as_array_mut()?;
        let e = pick(r, entries)?;
        entries.push(e);
        Some(())
    }),
    ("category", |d, r, _| {
        let (p, _) = pick(r, &edit_pointers(d))?;
        d.pointer_mut(&p)?["category"] = json!("no-such-category");
        Some(())
    }),
    ("empty span", |d, r, _| {
        let (p, _, _) = pick(r, &span_pointers(d))?;
        let s = d.pointer_mut(&p)?;
        s["end"] = s["start"].clone();
        Some(())
    }),
    ("span past end", |d, r, c| {
        let (p, inst, side) = pick(r, &span_pointers(d))?;
        let (src, tgt) = c.lens[&inst];
        let len = if side == "source" { src? } else { tgt };
        d.pointer_mut(&p)?["end"] = json!(len + 1);
        Some(())
    }),
    ("span granularity", |d, r, c| {
        let (p, _, _) = pick(r, &span_pointers(d))?;
        let other = ["char", "whitespace", "subword"]
            .into_iter()
            .find(|g| *g != c.t.config.boundary.as_str())?;
        d.pointer_mut(&p)?["granularity"] = json!(other);
        Some(())
    }),
    ("span type", |d, r, _| {
        let (p, _, _) = pick(r, &span_pointers(d))?;
        d.pointer_mut(&p)?["start"] = json!("zero");
        Some(())
    }),
    ("span unknown field", |d, r, _| {
        let (p, _, _) = pick(r, &span_pointers(d))?;
        d.pointer_mut(&p)?["width"] = json!(3);
        Some(())
    }),
    ("drop span start", |d, r, _| {
        let (p, _, _) = pick(r, &span_pointers(d))?;
        d.pointer_mut(&p)?.as_object_mut()?.remove("start");
        Some(())
    }),
    ("answer question", |d, r, _| {
        let p = pick(r, &answer_pointers(d))?;
        d.pointer_mut(&p)?["question"] = json!("no-such-question");
        Some(())
    }),
    ("answer option range", |d, r, _| {
        let p = pick(r, &answer_pointers(d))?;
        let a = d.pointer_mut(&p)?;
        a.get("option")?;
        a["option"] = json!(5);
        Some(())
    }),
    ("answer kind", |d, r, _| {
        let p = pick(r, &answer_pointers(d))?;
        let a = d.pointer_mut(&p)?.as_object_mut()?;
        if a.remove("option").is_some() {
            a.insert("text".into(), json!("free text"));
        } else {
            a.remove("text");
            a.insert("option".into(), json!(0));
        }
        Some(())
    }),
    ("answer without value", |d, r, _| {
        let p = pick(r, &answer_pointers(d))?;
        let a = d.pointer_mut(&p)?.as_object_mut()?;
        a.remove("option");
        a.remove("text");
        Some(())
    }),
    ("drop first answer", |d, r, c| {
        // In full mode the first answer is always a root question, which
        // must be answered.
        if c.t.config.mode != Mode::Full {
            return None;
        }
        let (p, _) = pick(
            r,
            &edit_pointers(d)
                .into_iter()
                .filter(|(p, _)| {
                    d.pointer(p)
                        .and_then(|e| e["answers"].as_array())
                        .is_some_and(|a| !a.is_empty())
                })
                .collect::<Vec<_>>(),
        )?;
        d.pointer_mut(&format!("{p}/answers"))?
            .as_array_mut()?
            .remove(0);
        Some(())
    }),
    ("composite loses children", |d, r, _| {
        let (p, _) = pick(
            r,
            &edit_pointers(d)
                .into_iter()
                .filter(|(p, _)| {
                    d.pointer(p)
                        .and_then(|e| e["children"].as_array())
                        .is_some_and(|c| !c.is_empty())
                })
                .collect::<Vec<_>>(),
        )?;
        d.pointer_mut(&p)?["children"] = json!([]);
        Some(())
    }),
    ("span moves side", |d, r, c| {
        // Move a span to a side its category cannot select.
        let (p, _) = pick(r, &edit_pointers(d))?;
        let e = d.pointer_mut(&p)?;
        let cat = c.t.category(e["category"].as_str()?)?;
        let (from, to) = if !cat.side.allows_source() {
            ("target", "source")
        } else if !cat.side.allows_target() {
            ("source", "target")
        } else {
            return None;
        };
        let span = e[from].as_array_mut()?.pop()?;
        e[to] = json!([span]);
        Some(())
    }),
];

/// Applies `count` mutations, cycling through the operators over seeded
/// worlds, and returns how often each operator was applied. Fails on the
/// first corrupted file that still parses.
pub fn run(count: usize) -> Result<BTreeMap<&'static str, usize>, String> {
    let mut applied = 0;
    let mut per_op: BTreeMap<&str, usize> = BTreeMap::new();
    let mut seed = 0u64;
    while applied < count {
        seed += 1;
        let r = &mut super::rng(seed);
        let t = super::typology(r);
        let instances = super::instances(r, &t);
        let set = super::annotation_set(r, &t, &instances, "ann");
        let lens = instances
            .iter()
            .map(|i| {
                (
                    i.id.clone(),
                    (i.source.as_deref().map(char_len), char_len(&i.target)),
                )
            })
            .collect();
        let ctx = Ctx { t: &t, lens };
        let original: Value = serde_json::from_str(&serialize_annotations(&set)).unwrap();
        let r = &mut super::rng(seed ^ 0x5eed);
        let (name, op) = MUTATIONS[seed as usize % MUTATIONS.len()];
        let mut doc = original.clone();
        if op(&mut doc, r, &ctx).is_none() || doc == original {
            continue;
        }
        applied += 1;
        *per_op.entry(name).or_default() += 1;
        let text = serde_json::to_string(&doc).unwrap();
        if parse_annotations(&text, &t, &instances).is_ok() {
            return Err(format!(
                "mutation `{name}` (seed {seed}) was accepted:\n{text}"
            ));
        }
    }
    Ok(per_op)
}
